//! Fixed-seed demo datasets.

use std::path::Path;

use im_infer::rng::{derive_seed, stream_rng};
use rand_distr::{Distribution, Normal};

/// `(file name, mean, size)`; standard deviation is 1 throughout.
pub const DEMO_SETS: [(&str, f64, usize); 3] =
    [("fig1_mu1.csv", 1.0, 30), ("fig1_mu0.csv", 0.0, 30), ("fig2_sample.csv", 0.1, 10)];

pub fn demo_observations(seed: u64, index: usize) -> Vec<f64> {
    let (_, mu, n) = DEMO_SETS[index];
    let mut rng = stream_rng(derive_seed(seed, 0xDE30 + index as u64), 0);
    let normal = Normal::new(mu, 1.0).expect("unit standard deviation");
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

pub fn write_demo_sets(dir: &Path, seed: u64) -> std::io::Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, (name, _, _)) in DEMO_SETS.iter().enumerate() {
        let path = dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["x"])?;
        for v in demo_observations(seed, i) {
            w.write_record([v.to_string()])?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}
