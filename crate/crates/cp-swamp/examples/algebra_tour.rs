//! A tour of the multilinear algebra underneath the solvers: matricization
//! and its inverse, the Khatri-Rao product, the model identity that turns
//! tensor fitting into per-mode least squares, the cost gradient, and the
//! k-rank based uniqueness certificate.
//!
//! Run with `cargo run --example algebra_tour`.

use cp_swamp::linalg::{k_rank, khatri_rao, kronecker, solve_least_squares};
use cp_swamp::problems::{example1, random_rank_tensor};
use cp_swamp::tensor::{dematricize, matricize, Matrix};

fn main() -> cp_swamp::Result<()> {
    let (tensor, truth) = random_rank_tensor(&[3, 4, 2], 2, 7)?;

    // Mode-n matricization lays the mode-n fibers out as columns; it is a
    // pure rearrangement, so it inverts exactly and preserves the norm.
    for mode in 1..=3 {
        let unfolded = matricize(&tensor, mode)?;
        let back = dematricize(&unfolded, tensor.dims(), mode)?;
        assert_eq!(back, tensor);
        println!(
            "mode-{mode} unfolding: {}x{}, norm^2 {:.12} (tensor {:.12})",
            unfolded.nrows(),
            unfolded.ncols(),
            unfolded.norm_squared(),
            tensor.frobenius_norm_sq()
        );
    }

    // The Khatri-Rao product is the columnwise Kronecker product.
    let a = Matrix::from_row_slice(2, 2, &[1., 2., 3., 4.]);
    let b = Matrix::from_row_slice(3, 2, &[5., 6., 7., 8., 9., 10.]);
    let kr = khatri_rao(&a, &b)?;
    let col = |m: &Matrix, c: usize| {
        Matrix::from_column_slice(m.nrows(), 1, m.column(c).clone_owned().as_slice())
    };
    for c in 0..2 {
        let product = kronecker(&col(&a, c), &col(&b, c));
        assert_eq!(kr.column(c), product.column(0));
    }
    println!("\nkhatri_rao(2x2, 3x2) -> {}x{}, columnwise Kronecker", kr.nrows(), kr.ncols());

    // Model identity: the mode-n unfolding of a CP model is the mode-n
    // factor times the Khatri-Rao product of all the others, transposed.
    // That is what reduces each mode's update to one least-squares solve.
    let t1 = matricize(&tensor, 1)?;
    let k1 = truth.khatri_rao_excluding(1);
    let residual = (&t1 - truth.factor(1) * k1.transpose()).norm() / t1.norm();
    println!("model identity residual on mode 1: {residual:.3e}");

    // The least-squares kernel returns the minimum-norm solution; its
    // residual is orthogonal to the column space.
    let x = solve_least_squares(&k1, &t1.transpose(), 0.0)?;
    let orth = (k1.transpose() * (&k1 * &x - t1.transpose())).norm();
    println!("normal-equation residual of the mode-1 solve: {orth:.3e}");

    // Gradient of the squared fit against central finite differences.
    let guess = cp_swamp::solver::random_factors(&[3, 4, 2], 2, 99)?;
    let grad = guess.gradient(&tensor)?;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (mode, g) in grad.iter().enumerate() {
        let mut plus = guess.clone();
        let mut minus = guess.clone();
        let mut fp = plus.factor(mode + 1).clone();
        let mut fm = minus.factor(mode + 1).clone();
        fp[(0, 0)] += h;
        fm[(0, 0)] -= h;
        plus.set_factor(mode + 1, fp)?;
        minus.set_factor(mode + 1, fm)?;
        let fd = (plus.fit_error(&tensor)?.powi(2) - minus.fit_error(&tensor)?.powi(2)) / (2.0 * h);
        worst = worst.max((fd - g[(0, 0)]).abs() / g.norm());
    }
    println!("gradient vs finite differences, worst relative gap: {worst:.3e}");

    // Exact factors are critical points of the fit.
    println!(
        "stationarity residual at the exact factors: {:.3e}",
        truth.critical_point_residual(&tensor)?
    );

    // The Kruskal condition certifies uniqueness of a decomposition from
    // the factor k-ranks. Example 1's truth passes it.
    let report = example1().truth.uniqueness_report(0.0)?;
    print!("\n{report}");

    // k-rank: every 2 columns of this matrix are independent, but the
    // third equals the sum of the first two.
    let m = Matrix::from_row_slice(3, 3, &[1., 0., 1., 0., 1., 1., 0., 0., 0.]);
    println!("k_rank of a matrix with a hidden column sum: {}", k_rank(&m, 0.0)?);
    Ok(())
}
