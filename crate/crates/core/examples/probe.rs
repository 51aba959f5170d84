use incident_core::experiments::*;
use incident_core::synth::{generate, table_v_profile, Law};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(|s| s.as_str()).unwrap_or("screen");

    if mode == "screen" {
        // criterion 6 probe: per seed, check age row + filler exclusions at scale 0.25
        for seed in 1u64..=8 {
            let t = Instant::now();
            let cfg = ExperimentConfig::new(
                DataSource::synth("table-v", table_v_profile(), 0.25),
                seed,
            );
            let (_, rows) = screen_all(&cfg).unwrap();
            let age = rows.iter().find(|r| r.variable == "Patient age").unwrap();
            let fillers_kept: Vec<&str> = rows
                .iter()
                .filter(|r| r.variable.starts_with("filler_") && r.passes_guideline())
                .map(|r| r.variable.as_str())
                .collect();
            let named_kept: Vec<String> = rows
                .iter()
                .filter(|r| !r.variable.starts_with("filler_") && r.passes_guideline())
                .map(|r| r.variable.clone())
                .collect();
            println!(
                "seed {seed}: age recall {:.4} (model {}), prec {:.4}, mean_fall {:.2}, mean_nofall {:.2}, fillers kept: {}, named kept: {:?} [{:.1}s]",
                age.best_recall, age.best_recall_model, age.best_precision,
                age.stats.mean_fall, age.stats.mean_nofall,
                fillers_kept.len(), named_kept, t.elapsed().as_secs_f64()
            );
        }
    }

    if mode == "laws" {
        // synth law convergence at scale 1.0: worst binary |freq - p| per class
        let profile = table_v_profile();
        for seed in 1u64..=10 {
            let d = generate(&profile, 1.0, seed).unwrap();
            let mut worst_fall = (0.0f64, String::new());
            let mut worst_nofall = (0.0f64, String::new());
            let mut age_dev = 0.0;
            for (j, var) in profile.variables.iter().enumerate() {
                let (mut sum1, mut n1, mut sum0, mut n0) = (0.0, 0usize, 0.0, 0usize);
                for (row, &l) in d.rows().zip(d.labels()) {
                    if l == 1 { sum1 += row[j]; n1 += 1; } else { sum0 += row[j]; n0 += 1; }
                }
                let m1 = sum1 / n1 as f64;
                let m0 = sum0 / n0 as f64;
                match (var.fall, var.nofall) {
                    (Law::Bernoulli { p: p1 }, Law::Bernoulli { p: p0 }) => {
                        if (m1 - p1).abs() > worst_fall.0 { worst_fall = ((m1 - p1).abs(), var.name.clone()); }
                        if (m0 - p0).abs() > worst_nofall.0 { worst_nofall = ((m0 - p0).abs(), var.name.clone()); }
                    }
                    (Law::Normal { mean, .. }, _) => {
                        if var.name == "Patient age" { age_dev = m1 - mean; }
                    }
                    _ => {}
                }
            }
            println!(
                "seed {seed}: worst fall |df| {:.4} ({}), worst nofall |df| {:.5} ({}), age fall dev {:+.3}",
                worst_fall.0, worst_fall.1, worst_nofall.0, worst_nofall.1, age_dev
            );
        }
    }

    if mode == "timing" {
        let t = Instant::now();
        let cfg = ExperimentConfig::new(DataSource::synth("table-v", table_v_profile(), 1.0), 42);
        let r = run_experiment1(&cfg).unwrap();
        println!("exp1 scale 1.0: {:.1}s", t.elapsed().as_secs_f64());
        print!("{}", r.render(ReportFormat::Csv));

        let t = Instant::now();
        let cfg = ExperimentConfig::new(DataSource::synth("table-v", table_v_profile(), 0.25), 42);
        let rs = run_experiment2(&cfg).unwrap();
        println!("exp2 scale 0.25: {:.1}s", t.elapsed().as_secs_f64());
        for r in &rs {
            print!("{}", r.render(ReportFormat::Csv));
        }
    }
}
