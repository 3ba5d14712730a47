//! Parse GHCNd daily records and a station inventory, then write them back.

use precip_merge::ingest::{parse_ghcnd_dly, parse_ghcnd_stations, write_ghcnd_dly};

fn main() {
    let mut line = format!("{:<11}{}{:02}PRCP", "USC00000001", 2014, 1);
    for (d, v) in [(1, 250), (2, -9999), (3, 0)]
        .into_iter()
        .chain((4..=31).map(|d| (d, -9999)))
    {
        let q = if d == 3 { 'G' } else { ' ' };
        line.push_str(&format!("{v:>5} {q} "));
    }
    let data = parse_ghcnd_dly(line.as_bytes()).unwrap();
    for (id, series) in &data {
        for (date, obs) in series {
            println!("{id} {date} {:5.1} mm quality_ok={}", obs.precip_mm, obs.quality_ok());
        }
    }
    let mut out = Vec::new();
    write_ghcnd_dly(&mut out, &data).unwrap();
    println!(
        "rewritten line length: {}",
        String::from_utf8(out).unwrap().trim_end_matches('\n').len()
    );

    let inv =
        "USC00000001  38.8977  -77.0365   17.0 DC WASHINGTON\nUSC00000002  40.7128  -74.0060 -999.9 NY NEW YORK\n";
    let inv = parse_ghcnd_stations(inv.as_bytes()).unwrap();
    println!(
        "kept {:?}, excluded {:?}",
        inv.stations.keys().collect::<Vec<_>>(),
        inv.excluded
    );
}
