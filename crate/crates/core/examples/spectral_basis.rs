//! Cosine basis, quadrature grid and the Neumann Laplacian on a rectangle.

use chd_galerkin::spectral::{inverse_neumann_laplacian, neumann_laplacian, Discretization, Domain};

fn main() -> chd_galerkin::Result<()> {
    let disc = Discretization::new(Domain::rectangle(2.0, 1.0)?, 8)?;
    let b = &disc.basis;
    println!("{} modes, grid {:?}", b.len(), disc.transform.grid().nodes());
    println!("smallest eigenvalues: {:?}", &b.sorted_eigenvalues()[..5]);

    let grid = disc.transform.grid();
    let f = grid.sample(|x, y| (std::f64::consts::PI * x / 2.0).cos() * (3.0 * std::f64::consts::PI * y).cos());
    let c = disc.transform.to_coeffs(&f)?;
    let back = disc.transform.to_grid(&c)?;
    let err = back.zip_map(&f, |a, b| a - b).max_abs();
    println!("grid -> coeffs -> grid error: {err:.2e}");

    let lap = neumann_laplacian(&c);
    let round = inverse_neumann_laplacian(&lap)?;
    let err = round.coeffs.iter().zip(&c.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("inverse Laplacian round trip error: {err:.2e}");
    Ok(())
}
