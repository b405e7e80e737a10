//! Kendall tau between rankings, and what a random ranker scores.

use hdrank::eval::{kendall_tau, kendall_tau_pairwise, null_tau_std, random_baseline};
use hdrank::RankTable;

fn main() -> hdrank::Result<()> {
    let truth = vec![0, 1, 2, 3, 4, 5];
    let close = vec![1, 0, 2, 3, 5, 4];
    let reversed: Vec<usize> = truth.iter().map(|r| 5 - r).collect();

    println!("tau(truth, truth)    = {:+.4}", kendall_tau(&truth, &truth)?);
    println!("tau(truth, close)    = {:+.4}", kendall_tau(&truth, &close)?);
    println!("tau(truth, reversed) = {:+.4}", kendall_tau(&truth, &reversed)?);
    println!("pairwise reference   = {:+.4}", kendall_tau_pairwise(&truth, &close)?);

    let n = 5_000;
    let table = RankTable::new(vec!["task".into()], vec![(0..n).collect()])?;
    let b = random_baseline(&table, 200, 0)?;
    println!(
        "random ranker, n = {n}: mean {:+.4}, sample std {:.4}, theory {:.4}",
        b.mean,
        b.std.unwrap_or(f64::NAN),
        null_tau_std(n)
    );
    Ok(())
}
