//! Train the ten pair networks, classify held-out rows by flag voting and
//! show the vote counts, ties and the per-pair accuracy table.

use ecg_ovo::eval::{evaluate_bank, pair_rows, render_pairwise_table};
use ecg_ovo::hrv::synthetic::separable_blobs;
use ecg_ovo::neural::{split_70_30, NetKind};
use ecg_ovo::ovo::{train_bank, ClassSet, NetConfig};

fn main() -> ecg_ovo::Result<()> {
    let classes = ClassSet::default();
    let data = separable_blobs(&classes.names, 40, 8);
    let (train, test) = split_70_30(&data, 8)?;
    let (bank, _) = train_bank(&train, &NetConfig::new(NetKind::Pattern), 8)?;

    println!("row  truth                          decision                       FA FB FC FD FE");
    for (i, (x, &label)) in test.rows.iter().zip(&test.labels).take(8).enumerate() {
        let d = bank.classify(x)?;
        let f = d.flags.counts;
        println!(
            "{i:>3}  {:<30} {:<30} {}  {}  {}  {}  {}{}",
            classes.names[label],
            classes.names[d.class],
            f[0],
            f[1],
            f[2],
            f[3],
            f[4],
            if d.tie_broken { "  (tie)" } else { "" }
        );
    }
    let report = evaluate_bank(&bank, &test, Default::default())?;
    println!("\n{}", report.to_text());
    let banks = [None, None, None, Some(&bank)];
    print!("{}", render_pairwise_table(&pair_rows(&banks, &test, true)?));
    Ok(())
}
