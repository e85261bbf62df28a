//! Train each network kind with scaled conjugate gradient on a two-class
//! problem, stopping on validation patience, and report the loss curve.

use ecg_ovo::hrv::synthetic::separable_blobs;
use ecg_ovo::neural::{init_network, scg_train, split_70_30, NetKind, ScgParams, Topology};

fn main() -> ecg_ovo::Result<()> {
    let names = vec!["Sleep Apnea".to_string(), "Normal".to_string()];
    let data = separable_blobs(&names, 60, 2024);
    let (train, test) = split_70_30(&data, 1)?;
    let (fit, val) = split_70_30(&train, 2)?;
    let params = ScgParams::default();

    for kind in NetKind::ALL {
        let topology = Topology::new(kind, 15, vec![7], 2)?;
        let net = init_network(topology, names.clone(), 5);
        let (trained, history) = scg_train(&net, &fit, Some(&val), &params)?;
        let correct = test
            .rows
            .iter()
            .zip(&test.labels)
            .filter(|(x, &l)| trained.predict(x).map(|p| p.class == l).unwrap_or(false))
            .count();
        let curve: Vec<String> = history.loss.iter().step_by(10).take(6).map(|l| format!("{l:.4}")).collect();
        println!(
            "{kind:<12} {} steps, stop {:?}, loss {} ..., test accuracy {:.1}%",
            history.loss.len() - 1,
            history.stop,
            curve.join(" "),
            100.0 * correct as f64 / test.len() as f64
        );
    }
    Ok(())
}
