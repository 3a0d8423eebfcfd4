//! Recall metrics, error reduction and the Wilcoxon signed-rank test on
//! paired per-fold scores.

use wv_enrich::metrics::{
    error_reduction, macro_recall, micro_recall, tally, wilcoxon_signed_rank,
};

fn main() -> wv_enrich::Result<()> {
    let gold = [vec!["a"], vec!["a"], vec!["a"], vec!["b"], vec!["c", "a"]];
    let predicted = ["a", "a", "b", "b", "a"];
    let primary = ["a", "a", "a", "b", "c"];
    let t = tally(&gold, &predicted, &primary)?;
    println!("micro {:.3}  macro {:.3}", micro_recall(&t)?, macro_recall(&t)?);

    println!("error reduction 0.178 -> 0.212: {:.2}%", error_reduction(0.178, 0.212)?);

    let baseline = [0.71, 0.74, 0.69, 0.73, 0.70, 0.72, 0.75, 0.68, 0.71, 0.73];
    let enriched = [0.74, 0.75, 0.73, 0.73, 0.74, 0.75, 0.76, 0.72, 0.70, 0.77];
    let w = wilcoxon_signed_rank(&baseline, &enriched)?;
    println!(
        "W+ = {}, n = {}, p = {:.4} ({})",
        w.w_plus,
        w.n,
        w.p_two_sided,
        if w.exact { "exact" } else { "normal approximation" }
    );
    Ok(())
}
