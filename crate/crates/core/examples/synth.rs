//! Generate a small synthetic benchmark and show the head of each file.

use precip_merge::cli::{generate, SynthSpec};

fn main() {
    let files = generate(&SynthSpec {
        n_stations: 3,
        n_days: 5,
        ..Default::default()
    })
    .unwrap();
    for (name, bytes) in files.named() {
        let text = String::from_utf8_lossy(bytes);
        println!("== {name} ({} bytes)", bytes.len());
        for line in text.lines().take(3) {
            println!("{}", &line[..line.len().min(100)]);
        }
    }
}
