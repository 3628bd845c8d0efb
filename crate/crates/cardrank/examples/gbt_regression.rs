//! Fit the boosted-tree regressor on a parabola and watch the loss fall.
//!
//! ```bash
//! cargo run -p cardrank --example gbt_regression
//! ```

use cardrank::gbt::{fit_gbt, Dataset, GbtConfig};

fn main() -> cardrank::Result<()> {
    let features: Vec<Vec<f64>> = (0..200)
        .map(|i| vec![-1.0 + 2.0 * i as f64 / 199.0])
        .collect();
    let targets: Vec<f64> = features.iter().map(|row| row[0] * row[0]).collect();
    let data = Dataset::new(features.clone(), targets.clone())?;

    let config = GbtConfig {
        min_samples_per_leaf: 1,
        ..GbtConfig::default()
    };
    let model = fit_gbt(&data, &config)?;
    println!(
        "{} trees, {} leaves max, shrinkage {}",
        config.num_trees, config.max_leaf_nodes, config.shrinkage
    );

    for stage in [0, 1, 2, 4, 8, 16, 32, 67] {
        let mse: f64 = features
            .iter()
            .zip(&targets)
            .map(|(row, &y)| {
                let mut pred = model.initial_estimate;
                for (tree, beta) in model.trees.iter().take(stage).zip(&model.tree_weights) {
                    pred += model.shrinkage * beta * tree.predict(row);
                }
                (y - pred) * (y - pred)
            })
            .sum::<f64>()
            / targets.len() as f64;
        println!("after {stage:>2} trees: training MSE {mse:.3e}");
    }

    for x in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        println!("f({x:+.1}) = {:+.4}  (true {:+.4})", model.predict(&[x])?, x * x);
    }
    Ok(())
}
