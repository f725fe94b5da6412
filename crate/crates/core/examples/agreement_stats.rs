//! Chi-squared, Cohen's kappa and Fleiss' kappa on small tables.

use chatsat::eval::{chi_squared_2x2, chi_squared_sf, cohen_kappa, fleiss_kappa};

fn main() -> chatsat::Result<()> {
    let table = [[120, 480], [330, 270]];
    let (stat, p) = chi_squared_2x2(table)?;
    println!("chi-squared {table:?}: {stat:.3}, p {p:.3e}");
    for x in [2.706, 3.841, 6.635] {
        println!("P(chi2_1 > {x}) = {:.4}", chi_squared_sf(x, 1.0));
    }
    let a = [1, 1, 0, 0, 1, 0, 1, 1, 0, 1];
    let b = [1, 0, 0, 0, 1, 1, 1, 1, 0, 0];
    println!("Cohen's kappa: {:.4}", cohen_kappa(&a, &b)?);
    // Three raters assign each of five sessions to satisfied / dissatisfied.
    let counts = vec![vec![3, 0], vec![2, 1], vec![0, 3], vec![1, 2], vec![3, 0]];
    println!("Fleiss' kappa: {:.4}", fleiss_kappa(&counts, 3)?);
    Ok(())
}
