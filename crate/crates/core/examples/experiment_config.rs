//! Experiments from configuration: a preset written out as TOML, edited,
//! read back and run at a small scale.

use mlsc::experiment::{preset, Experiment, ExperimentConfig, Method, ReferenceConfig};

fn main() -> mlsc::Result<()> {
    let text = preset("paper-1d-n20")?.to_toml()?;
    println!("{text}");

    let mut cfg = ExperimentConfig::from_toml(&text)?;
    cfg.eps = vec![5e-3, 1e-3];
    cfg.reference = Some(ReferenceConfig {
        h_star: 1.0 / 128.0,
        l_star: 3,
        cache_dir: None,
    });
    let exp = Experiment::new(cfg)?;
    for method in [Method::Slsc, Method::Mlsc] {
        for &eps in &exp.config.eps {
            let (row, _) = exp.run_one(method, Some(eps))?;
            println!(
                "{method} eps = {eps:.0e}: K = {}, grids {}, rel err {:.2e}, model cost {:.0}",
                row.k,
                row.grids,
                row.rel_err.unwrap_or(f64::NAN),
                row.model_cost
            );
        }
    }
    Ok(())
}
