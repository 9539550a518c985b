//! Run a bundled scenario through the library and print its checks.

use torsor::scenario::{find_bundled, run, RunOptions};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "pointwise_coriolis".into());
    let scenario = find_bundled(&name).expect("unknown scenario").load().unwrap();
    let dir = std::env::temp_dir().join("torsor-example");
    let report = run(&scenario, &RunOptions { out_dir: dir, ..RunOptions::default() }).unwrap();
    for c in &report.checks {
        println!("{}", c.line());
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
}
