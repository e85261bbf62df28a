//! Five-output baselines against pairwise banks for all four network
//! kinds, trained concurrently, rendered as the comparison and pairwise
//! tables.
//!
//!     cargo run --release --example compare_methods -- out_dir

use ecg_ovo::eval::{CompareOptions, CompareOutput};
use ecg_ovo::hrv::synthetic::separable_blobs;
use ecg_ovo::neural::split_70_30;
use ecg_ovo::ovo::ClassSet;

fn main() -> ecg_ovo::Result<()> {
    let data = separable_blobs(&ClassSet::default().names, 100, 500);
    let (train, test) = split_70_30(&data, 7)?;
    let opts = CompareOptions {
        seed: 11,
        ..CompareOptions::default()
    };
    let start = std::time::Instant::now();
    let result = CompareOutput::run(&train, &test, &opts)?;
    println!("trained 4 baselines and 4 banks in {:.1} s\n", start.elapsed().as_secs_f64());
    println!("{}", result.comparison_table);
    println!("{}", result.pairwise_table);
    for ((kind, _, normal), (_, _, proposed)) in result.baselines.iter().zip(&result.banks) {
        println!(
            "{kind:<12} overall: baseline {:.2}%  ensemble {:.2}% ({} ties)",
            normal.overall_accuracy, proposed.overall_accuracy, proposed.ties
        );
    }
    if let Some(dir) = std::env::args().nth(1) {
        result.write(dir.as_ref())?;
        println!("artifacts written to {dir}");
    }
    Ok(())
}
