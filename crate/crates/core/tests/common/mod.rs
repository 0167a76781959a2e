#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use torsionfree_core::jets::Validity;
use torsionfree_core::{CurvatureMap, FormSeries, GradedCoefficient, MatrixElement, ValueSpace};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn rand_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn rand_matrix(rng: &mut StdRng, n: usize) -> MatrixElement {
    MatrixElement::from_row_major(n, rand_vec(rng, n * n)).unwrap()
}

/// Well-conditioned random matrix near the identity.
pub fn rand_invertible(rng: &mut StdRng, n: usize) -> MatrixElement {
    MatrixElement::identity(n).add(&rand_matrix(rng, n).scale(0.3))
}

pub fn rand_coeff(rng: &mut StdRng, n: usize, m: usize, k: usize, value: ValueSpace) -> GradedCoefficient {
    let len = GradedCoefficient::zeros(n, m, k, value).data().len();
    GradedCoefficient::from_data(n, m, k, value, rand_vec(rng, len)).unwrap()
}

/// Random series with pieces `0..order`, top piece zero, so every operator
/// identity holds exactly on the stored range.
pub fn rand_series(rng: &mut StdRng, n: usize, k: usize, value: ValueSpace, order: usize) -> FormSeries {
    let pieces = (0..=order)
        .map(|m| {
            if m == order {
                GradedCoefficient::zeros(n, m, k, value)
            } else {
                rand_coeff(rng, n, m, k, value)
            }
        })
        .collect();
    FormSeries::from_pieces(pieces, Validity::Exact).unwrap()
}

/// Random polynomial curvature map with values in `K(gl(n))`.
pub fn rand_curvature(rng: &mut StdRng, n: usize, degree: usize) -> CurvatureMap {
    let coeffs = (0..=degree).map(|m| rand_coeff(rng, n, m, 2, ValueSpace::Matrix)).collect();
    CurvatureMap::new_unchecked(n, coeffs).unwrap().project_onto_k()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Series difference restricted to the degrees both sides trust.
pub fn series_diff(a: &FormSeries, b: &FormSeries) -> f64 {
    let top = a.valid_through().min(b.valid_through()).min(a.order()).min(b.order());
    (0..=top).map(|m| max_diff(a.piece(m).data(), b.piece(m).data())).fold(0.0, f64::max)
}

/// `so(n)` basis `E_pq − E_qp`.
pub fn so_basis(n: usize) -> Vec<MatrixElement> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            out.push(MatrixElement::from_fn(n, |i, j| {
                if i == p && j == q {
                    1.0
                } else if i == q && j == p {
                    -1.0
                } else {
                    0.0
                }
            }));
        }
    }
    out
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn gauss_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    if a.is_empty() {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            break;
        };
        if a[p][c].abs() <= tol {
            continue;
        }
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank {
                let f = a[r][c] / a[rank][c];
                for j in c..cols {
                    a[r][j] -= f * a[rank][j];
                }
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// Exact copy of `f` padded with zero pieces up to `order`.
pub fn widen(f: &FormSeries, order: usize) -> FormSeries {
    let mut pieces = f.pieces().to_vec();
    for m in pieces.len()..=order {
        pieces.push(GradedCoefficient::zeros(f.dim(), m, f.form_degree(), f.value_space()));
    }
    FormSeries::from_pieces(pieces, Validity::Exact).unwrap()
}
