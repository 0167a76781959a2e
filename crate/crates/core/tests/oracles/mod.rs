//! Pipeline-independent oracles shared by the solver tests and the
//! acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeMap;

use torsionfree_core::multilinear::index::{form_rank, sym_rank, SymTable};
use torsionfree_core::{CurvatureMap, FormSeries, GradedCoefficient, ValueSpace};

/// Dense polynomial: exponent vector → coefficient.
pub type Poly = BTreeMap<Vec<u8>, f64>;

fn add_term(p: &mut Poly, exps: Vec<u8>, c: f64) {
    *p.entry(exps).or_insert(0.0) += c;
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            add_term(&mut out, e, ca * cb);
        }
    }
    out
}

fn coordinate(n: usize, p: usize) -> Poly {
    let mut e = vec![0u8; n];
    e[p] = 1;
    Poly::from([(e, 1.0)])
}

fn degree(e: &[u8]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

pub fn multinomial(exps: &[u8]) -> f64 {
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    fact(degree(exps)) / exps.iter().map(|&e| fact(e as usize)).product::<f64>()
}

/// Polynomial curvature map in monomial form: `s[p][q][a][b]` is the
/// polynomial entry `(a, b)` of `S_v(e_p, e_q)` for `p < q`.
pub struct MonomialCurvature {
    pub n: usize,
    pub s: Vec<Vec<Vec<Vec<Poly>>>>,
}

impl MonomialCurvature {
    pub fn new(n: usize) -> Self {
        Self { n, s: vec![vec![vec![vec![Poly::new(); n]; n]; n]; n] }
    }

    pub fn add(&mut self, exps: Vec<u8>, p: usize, q: usize, a: usize, b: usize, c: f64) {
        assert!(p < q);
        add_term(&mut self.s[p][q][a][b], exps, c);
    }

    /// Stores each monomial `c v^α` as the tensor component `c / multinomial(α)`.
    pub fn to_curvature_map(&self) -> CurvatureMap {
        let n = self.n;
        let mut top = 0;
        for p in 0..n {
            for q in p + 1..n {
                for a in 0..n {
                    for b in 0..n {
                        for e in self.s[p][q][a][b].keys() {
                            top = top.max(degree(e));
                        }
                    }
                }
            }
        }
        let mut coeffs: Vec<GradedCoefficient> =
            (0..=top).map(|m| GradedCoefficient::zeros(n, m, 2, ValueSpace::Matrix)).collect();
        for p in 0..n {
            for q in p + 1..n {
                for a in 0..n {
                    for b in 0..n {
                        for (e, c) in &self.s[p][q][a][b] {
                            let m = degree(e);
                            let mu: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, e[i] as usize)).collect();
                            let s = sym_rank(n, &mu);
                            let f = form_rank(n, &[p, q]);
                            coeffs[m].entry_mut(s, f)[a * n + b] += c / multinomial(e);
                        }
                    }
                }
            }
        }
        CurvatureMap::new_unchecked(n, coeffs).unwrap()
    }

    /// Monomial form of a stored map: component times multinomial.
    pub fn from_curvature_map(s: &CurvatureMap) -> Self {
        let n = s.dim();
        let mut out = Self::new(n);
        for (m, c) in s.coeffs().iter().enumerate() {
            let table = SymTable::new(n, m);
            for k in 0..table.len() {
                let mult = multinomial(table.exps(k));
                for p in 0..n {
                    for q in p + 1..n {
                        let f = form_rank(n, &[p, q]);
                        for (ab, x) in c.entry(k, f).iter().enumerate() {
                            out.add(table.exps(k).to_vec(), p, q, ab / n, ab % n, mult * x);
                        }
                    }
                }
            }
        }
        out
    }

    /// Random coefficients in every `(p<q, a, b)` slot for all monomials of
    /// degree `0..=degree`.
    pub fn random(n: usize, degree: usize, mut sample: impl FnMut() -> f64) -> Self {
        let mut out = Self::new(n);
        for deg in 0..=degree {
            let table = SymTable::new(n, deg);
            for k in 0..table.len() {
                for p in 0..n {
                    for q in p + 1..n {
                        for a in 0..n {
                            for b in 0..n {
                                out.add(table.exps(k).to_vec(), p, q, a, b, sample());
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Largest gap between a solver `θ` and the brute-force polynomials.
pub fn theta_deviation(theta: &FormSeries, oracle: &[Vec<Poly>], order: usize) -> f64 {
    let n = theta.dim();
    let mut worst = 0.0f64;
    for m in 0..=order {
        let table = SymTable::new(n, m);
        for k in 0..table.len() {
            let exps = table.exps(k).to_vec();
            let mu: Vec<usize> = table.indices(k).iter().map(|&i| i as usize).collect();
            for j in 0..n {
                let comp = theta.component(m, &mu, &[j]);
                for i in 0..n {
                    let got = comp[i] * multinomial(&exps);
                    let expect = oracle[i][j].get(&exps).copied().unwrap_or(0.0);
                    worst = worst.max((got - expect).abs());
                }
            }
        }
    }
    worst
}

/// `θ_{ij}` polynomials (`θ_v(e_j) = Σ_i θ_{ij}(v) e_i`) solving
/// `L_ℰ(L_ℰ − 1) θ = S(ℰ, θ) ℰ`, `θ⁽⁰⁾ = dv`, degree by degree through `order`.
///
/// On a homogeneous 1-form piece of degree `d` the left side is the
/// diagonal operator `(d + 1) d`, so each degree is a diagonal linear solve.
pub fn brute_force_theta(s: &MonomialCurvature, order: usize) -> Vec<Vec<Poly>> {
    let n = s.n;
    let mut theta = vec![vec![Poly::new(); n]; n];
    for i in 0..n {
        add_term(&mut theta[i][i], vec![0u8; n], 1.0);
    }
    for d in 2..=order {
        // S_v(v, w) v with w = θ(e_j), restricted to degree d
        let mut rhs = vec![vec![Poly::new(); n]; n];
        for j in 0..n {
            for p in 0..n {
                for q in p + 1..n {
                    // v_p w_q − v_q w_p
                    let mut coef = Poly::new();
                    for (e, c) in mul(&coordinate(n, p), &theta[q][j]) {
                        add_term(&mut coef, e, c);
                    }
                    for (e, c) in mul(&coordinate(n, q), &theta[p][j]) {
                        add_term(&mut coef, e, -c);
                    }
                    for a in 0..n {
                        for b in 0..n {
                            let term = mul(&mul(&coef, &s.s[p][q][a][b]), &coordinate(n, b));
                            for (e, c) in term {
                                if degree(&e) == d {
                                    add_term(&mut rhs[a][j], e, c);
                                }
                            }
                        }
                    }
                }
            }
        }
        let diag = ((d + 1) * d) as f64;
        for i in 0..n {
            for j in 0..n {
                for (e, c) in &rhs[i][j] {
                    add_term(&mut theta[i][j], e.clone(), c / diag);
                }
            }
        }
    }
    theta
}

/// Normal-coordinate metric of the constant-curvature space form:
/// `g = v̂v̂ᵀ + (sn(r)/r)² (I − v̂v̂ᵀ)`, `sn = sin √κ r / √κ` (sinh for κ < 0).
pub fn space_form_metric(kappa: f64, v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let ratio = if r == 0.0 {
        1.0
    } else if kappa > 0.0 {
        (kappa.sqrt() * r).sin() / (kappa.sqrt() * r)
    } else if kappa < 0.0 {
        ((-kappa).sqrt() * r).sinh() / ((-kappa).sqrt() * r)
    } else {
        1.0
    };
    let f = ratio * ratio;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let radial = if r == 0.0 { 0.0 } else { v[i] * v[j] / (r * r) };
                    let id = if i == j { 1.0 } else { 0.0 };
                    radial + f * (id - radial)
                })
                .collect()
        })
        .collect()
}

fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap();
        m.swap(c, p);
        let d = m[c][c];
        m[c].iter_mut().for_each(|x| *x /= d);
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                let src = m[c].clone();
                m[r].iter_mut().zip(src).for_each(|(x, s)| *x -= f * s);
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Levi-Civita symbols `Γ^k_{ij}` of [`space_form_metric`], laid out
/// `[k][i][j]`, with metric derivatives by central differences.
pub fn space_form_christoffel(kappa: f64, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let h = 1e-5;
    let dg: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|l| {
            let mut p = v.to_vec();
            let mut m = v.to_vec();
            p[l] += h;
            m[l] -= h;
            let (gp, gm) = (space_form_metric(kappa, &p), space_form_metric(kappa, &m));
            (0..n).map(|i| (0..n).map(|j| (gp[i][j] - gm[i][j]) / (2.0 * h)).collect()).collect()
        })
        .collect();
    let ginv = invert(&space_form_metric(kappa, v));
    let mut out = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[(k * n + i) * n + j] = (0..n)
                    .map(|l| 0.5 * ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                    .sum();
            }
        }
    }
    out
}

/// Taylor coefficients of `sin(√κ t)/(√κ t)` (`sinh` for κ < 0) in `t²ʲ`:
/// `(−κ)ʲ / (2j + 1)!`.
pub fn sinc_coefficient(kappa: f64, j: usize) -> f64 {
    let fact: f64 = (1..=2 * j + 1).map(|i| i as f64).product();
    (-kappa).powi(j as i32) / fact
}

/// `S(e₀,e₁) = H(E₂₂)`, `S(e₀,e₂) = 2 H(E₂₁)` with `H` the action of
/// `gl(2)` on `Sym² ℝ²` in the basis `u₁², u₁u₂, u₂²`. The values lie in an
/// irreducibly embedded `gl(2) ⊂ gl(3)` and satisfy the first Bianchi identity.
pub fn sym2_gl2_fixture() -> CurvatureMap {
    let mut c = GradedCoefficient::zeros(3, 0, 2, ValueSpace::Matrix);
    let e = c.entry_mut(0, 0);
    e[4] = 1.0;
    e[8] = 2.0;
    let e = c.entry_mut(0, 1);
    e[3] = 4.0;
    e[7] = 2.0;
    CurvatureMap::new(3, vec![c], 1e-12).unwrap()
}
