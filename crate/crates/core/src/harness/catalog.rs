//! Catalog of verification suites.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;

use super::corpus::Sampler;
use super::{Case, Eval, Settings};
use crate::error::Error;
use crate::integral::{self, IndexBounds, MixedRelation, RhoPower, RotationPhase};
use crate::ks::{self, TruncationPolicy};
use crate::linalg::ComplexSquareMatrix;
use crate::poly::{self, PolarPoint, PolyIndex};
use crate::qseries::{self, QParameter};
use crate::quad::{QuadratureKind, QuadratureSpec};

/// Knobs a suite accepts, with their defaults. `None` means the knob is
/// not used by the suite.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Defaults {
    pub samples: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub max_index: Option<u32>,
    pub degree_cap: Option<u32>,
    pub q: Option<Vec<f64>>,
    pub truncation: Option<TruncationPolicy>,
    pub points: Option<usize>,
}

pub type Builder = fn(&Settings, u64) -> Vec<Case>;

#[derive(Clone)]
pub struct SuiteInfo {
    pub id: &'static str,
    pub module: &'static str,
    pub operation: &'static str,
    /// Short name of the identity under test.
    pub tag: &'static str,
    pub description: &'static str,
    pub tolerance: f64,
    pub defaults: Defaults,
    pub dim_range: (usize, usize),
    pub max_index_limit: Option<u32>,
    pub degree_cap_limit: Option<u32>,
    pub build: Builder,
}

impl std::fmt::Debug for SuiteInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SuiteInfo").field("id", &self.id).finish()
    }
}

/// Listing entry for `verify list`.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteListing {
    pub id: &'static str,
    pub module: &'static str,
    pub operation: &'static str,
    pub tag: &'static str,
    pub tolerance: f64,
    pub description: &'static str,
}

impl SuiteInfo {
    pub fn listing(&self) -> SuiteListing {
        SuiteListing {
            id: self.id,
            module: self.module,
            operation: self.operation,
            tag: self.tag,
            tolerance: self.tolerance,
            description: self.description,
        }
    }
}

pub fn find_suite(id: &str) -> Option<SuiteInfo> {
    catalog().into_iter().find(|s| s.id == id)
}

fn cj(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cjv(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| cj(z)).collect())
}

fn matrix_json(h: &ComplexSquareMatrix) -> Value {
    Value::Array(h.rows().iter().map(|r| cjv(r)).collect())
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn corpus(seed: u64, id: &str, part: impl std::fmt::Display) -> Sampler {
    Sampler::for_corpus(seed, &format!("{id}/{part}"))
}

fn spec(kind: QuadratureKind, points: usize) -> QuadratureSpec {
    QuadratureSpec { kind, points }
}

fn polar_in(s: &mut Sampler, lo: f64, hi: f64) -> Complex64 {
    let r = s.uniform(lo, hi);
    Complex64::from_polar(r, s.uniform(0.0, 2.0 * PI))
}

pub fn catalog() -> Vec<SuiteInfo> {
    let base = SuiteInfo {
        id: "",
        module: "",
        operation: "",
        tag: "",
        description: "",
        tolerance: 1e-8,
        defaults: Defaults::default(),
        dim_range: (0, 0),
        max_index_limit: Some(40),
        degree_cap_limit: None,
        build: |_, _| Vec::new(),
    };
    let grid = |m: u32| Defaults {
        max_index: Some(m),
        ..Defaults::default()
    };
    let grid_samples = |m: u32, n: usize| Defaults {
        max_index: Some(m),
        samples: Some(n),
        ..Defaults::default()
    };
    let grid_points = |m: u32, n: usize, p: usize| Defaults {
        max_index: Some(m),
        samples: Some(n),
        points: Some(p),
        ..Defaults::default()
    };
    vec![
        SuiteInfo {
            id: "poly.h2d.routes",
            module: "poly_core",
            operation: "h2d_laguerre",
            tag: "h2d.laguerre_connection",
            description: "direct finite sum against the Laguerre form for all m, n <= max_index; one record per (z1, z2) at the worst index pair",
            tolerance: 1e-9,
            defaults: grid_samples(12, 100),
            build: build_h2d_routes,
            ..base.clone()
        },
        SuiteInfo {
            id: "poly.h2d.gf",
            module: "poly_core",
            operation: "gf_h2d_partial",
            tag: "h2d.generating_function",
            description: "truncated generating function against exp(u z1 + v z2 - uv)",
            tolerance: 1e-12,
            defaults: Defaults {
                samples: Some(20),
                degree_cap: Some(40),
                ..Defaults::default()
            },
            degree_cap_limit: Some(150),
            build: build_h2d_gf,
            ..base.clone()
        },
        SuiteInfo {
            id: "poly.charlier.bilinear",
            module: "ks_series",
            operation: "charlier_bilinear_check",
            tag: "charlier.bilinear_sum",
            description: "closed form of the Charlier bilinear sum against the brute-force double sum, x, y in {1,2,3}, |u|,|v| <= xy/8",
            tolerance: 1e-6,
            defaults: Defaults {
                samples: Some(10),
                degree_cap: Some(40),
                ..Defaults::default()
            },
            degree_cap_limit: Some(80),
            build: build_charlier,
            ..base.clone()
        },
        SuiteInfo {
            id: "ks.real.identity",
            module: "ks_series",
            operation: "rhs_real",
            tag: "kibble_slepian.real",
            description: "det(I+S)^{-1/2} exp(X^T S (I+S)^{-1} X) against the Hermite series, symmetric S with Frobenius norm <= 0.3, X in [-1,1]^N",
            tolerance: 1e-7,
            defaults: Defaults {
                samples: Some(50),
                dims: Some(vec![1, 2, 3]),
                truncation: Some(TruncationPolicy::real_default()),
                ..Defaults::default()
            },
            dim_range: (1, 5),
            build: build_ks_real,
            ..base.clone()
        },
        SuiteInfo {
            id: "ks.complex.identity",
            module: "ks_series",
            operation: "rhs_complex",
            tag: "kibble_slepian.complex",
            description: "exp(W* H (I+H)^{-1} W) against det(I+H) times the 2D Hermite series, general complex H with max entry 0.8/N, |w_j| <= 1.5",
            tolerance: 1e-7,
            defaults: Defaults {
                samples: Some(50),
                dims: Some(vec![1, 2, 3]),
                truncation: Some(TruncationPolicy::complex_default()),
                ..Defaults::default()
            },
            dim_range: (1, 4),
            build: build_ks_complex,
            ..base.clone()
        },
        SuiteInfo {
            id: "ks.complex.hermitian",
            module: "ks_series",
            operation: "rhs_complex",
            tag: "kibble_slepian.hermitian",
            description: "as ks.complex.identity for Hermitian H with Frobenius norm <= 0.5",
            tolerance: 1e-7,
            defaults: Defaults {
                samples: Some(10),
                dims: Some(vec![2, 3]),
                truncation: Some(TruncationPolicy::complex_default()),
                ..Defaults::default()
            },
            dim_range: (1, 4),
            build: build_ks_hermitian,
            ..base.clone()
        },
        SuiteInfo {
            id: "ks.laguerre.form",
            module: "ks_series",
            operation: "rhs_laguerre",
            tag: "kibble_slepian.laguerre",
            description: "Laguerre form of the complex series against the 2D Hermite form on the ks.complex.identity corpus",
            tolerance: 1e-10,
            defaults: Defaults {
                samples: Some(50),
                dims: Some(vec![1, 2, 3]),
                truncation: Some(TruncationPolicy::complex_default()),
                ..Defaults::default()
            },
            dim_range: (1, 4),
            build: build_ks_laguerre,
            ..base.clone()
        },
        SuiteInfo {
            id: "poly.h2d.bound",
            module: "poly_core",
            operation: "h2d_direct",
            tag: "h2d.growth_bound",
            description: "|H_{m,n}(conj z, z)| <= e^{|z|^2} sqrt(m! n!) for m, n <= max_index; lhs is the largest ratio, abs_err the excess over 1",
            tolerance: 1e-12,
            defaults: grid_samples(10, 200),
            build: build_bound,
            ..base.clone()
        },
        SuiteInfo {
            id: "ks.expansion.real",
            module: "ks_series",
            operation: "quadratic_series_real",
            tag: "expansion.real_quadratic",
            description: "exp(-Y^T S Y) against its multinomial shell expansion",
            tolerance: 1e-9,
            defaults: Defaults {
                samples: Some(10),
                dims: Some(vec![1, 2, 3]),
                truncation: Some(TruncationPolicy {
                    max_degree: 60,
                    shell_tol: 1e-15,
                    quiet_shells: 3,
                }),
                ..Defaults::default()
            },
            dim_range: (1, 4),
            build: build_expansion_real,
            ..base.clone()
        },
        SuiteInfo {
            id: "ks.expansion.complex",
            module: "ks_series",
            operation: "quadratic_series_complex",
            tag: "expansion.complex_quadratic",
            description: "exp(-Z* H Z) against its multinomial shell expansion",
            tolerance: 1e-9,
            defaults: Defaults {
                samples: Some(10),
                dims: Some(vec![1, 2, 3]),
                truncation: Some(TruncationPolicy {
                    max_degree: 60,
                    shell_tol: 1e-15,
                    quiet_shells: 3,
                }),
                ..Defaults::default()
            },
            dim_range: (1, 3),
            build: build_expansion_complex,
            ..base.clone()
        },
        SuiteInfo {
            id: "integral.hermite_moment",
            module: "integral_reps",
            operation: "check_hermite_moment",
            tag: "hermite.fourier_moment",
            description: "H_n(x) e^{-x^2} against a Gauss-Hermite moment integral",
            defaults: Defaults {
                max_index: Some(6),
                points: Some(60),
                ..Defaults::default()
            },
            build: build_hermite_moment,
            ..base.clone()
        },
        SuiteInfo {
            id: "integral.h2d_moment",
            module: "integral_reps",
            operation: "check_h2d_moment",
            tag: "h2d.plane_moment",
            description: "e^{-z1 z2} H_{m,n}(z1, z2) against a tensor Gauss-Hermite plane integral",
            defaults: grid_points(6, 2, 50),
            build: build_h2d_moment,
            ..base.clone()
        },
        SuiteInfo {
            id: "integral.h2d_moment_conjugate",
            module: "integral_reps",
            operation: "check_h2d_moment_conjugate",
            tag: "h2d.plane_moment_conjugate",
            description: "conjugate-argument plane integral for e^{-|z|^2} H_{m,n}(z, conj z)",
            defaults: grid_points(6, 2, 50),
            build: build_h2d_moment_conjugate,
            ..base.clone()
        },
        SuiteInfo {
            id: "integral.circle",
            module: "integral_reps",
            operation: "check_circle_rep",
            tag: "h2d.circle_hermite_complex",
            description: "circle integral of H_{m+n+1} at a complex argument against e^{-z1 z2} H_{m,n}(z1, z2)",
            defaults: grid_points(6, 1, 256),
            build: build_circle,
            ..base.clone()
        },
        SuiteInfo {
            id: "integral.circle_conjugate",
            module: "integral_reps",
            operation: "check_circle_rep_conjugate",
            tag: "h2d.circle_hermite_cosine",
            description: "cosine-argument circle integral against e^{-r^2} H_{m,n}(r e^{i theta}, r e^{-i theta})",
            defaults: grid_points(6, 1, 256),
            build: build_circle_conjugate,
            ..base.clone()
        },
        SuiteInfo {
            id: "integral.circle_laguerre",
            module: "integral_reps",
            operation: "check_circle_rep_laguerre",
            tag: "h2d.circle_laguerre",
            description: "cosine-argument circle integral against the Laguerre closed form, r in {0.3, 0.8, 1.5}",
            defaults: Defaults {
                max_index: Some(6),
                points: Some(256),
                ..Defaults::default()
            },
            build: build_circle_laguerre,
            ..base.clone()
        },
        SuiteInfo {
            id: "integral.circle_fourier",
            module: "integral_reps",
            operation: "check_circle_rep_fourier",
            tag: "h2d.circle_fourier",
            description: "H_{m,n}(z1, z2) as a Fourier coefficient of H_{m+n}((z1 e^{i phi} + z2 e^{-i phi})/2)",
            defaults: grid_points(6, 2, 64),
            build: build_circle_fourier,
            ..base.clone()
        },
        SuiteInfo {
            id: "integral.normal_real",
            module: "integral_reps",
            operation: "check_normal_integral_real",
            tag: "gaussian.real",
            description: "real Gaussian integral with linear phase against its closed form, random SPD A",
            defaults: Defaults {
                samples: Some(5),
                dims: Some(vec![1, 2, 3]),
                points: Some(30),
                ..Defaults::default()
            },
            dim_range: (1, 3),
            build: build_normal_real,
            ..base.clone()
        },
        SuiteInfo {
            id: "integral.normal_complex",
            module: "integral_reps",
            operation: "check_normal_integral_complex",
            tag: "gaussian.complex",
            description: "complex Gaussian integral against pi^N exp(-W*(I+H)^{-1}W)/det(I+H), Hermitian H",
            defaults: Defaults {
                samples: Some(5),
                dims: Some(vec![1, 2]),
                points: Some(20),
                ..Defaults::default()
            },
            dim_range: (1, 2),
            build: build_normal_complex,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.split_sum",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.split_sum",
            description: "H_n((w1+w2)/2) as a scaled sum of H_{j,n-j}(z w1, w2/z)",
            defaults: grid_samples(8, 2),
            build: build_split_sum,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.laguerre_sum",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.laguerre_sum",
            description: "H_n(rho (z + 1/z)/2) as a Laguerre sum",
            defaults: grid_samples(8, 2),
            build: build_laguerre_sum,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.cosine_laguerre",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.cosine_laguerre",
            description: "H_n(rho cos theta) as a Laguerre sum",
            defaults: grid_samples(8, 2),
            build: build_cosine_laguerre,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.fourier_coefficient",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.fourier_coefficient",
            description: "Fourier coefficients of H_n(rho cos theta) for |k| <= n",
            defaults: grid_points(8, 1, 256),
            build: build_fourier_coefficient,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.squared_average",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.squared_average",
            description: "circle average of H_n(rho cos theta)^2 as a sum of squared Laguerre values weighted by rho^{4j}",
            defaults: grid_points(8, 2, 256),
            build: build_squared_average,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.squared_average.low_power",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.squared_average_rho2j",
            description: "the squared average with weights rho^{2j}; expected to fail",
            defaults: grid_points(8, 2, 256),
            build: build_squared_average_low,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.rotated_product",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.rotated_product",
            description: "H_{m,n}(w1 - i w2, w1 + i w2) as a double sum of products of Hermite polynomials",
            defaults: grid_samples(8, 1),
            build: build_rotated_product,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.rotated_product.reversed",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.rotated_product_reversed",
            description: "the rotated product with reversed phase and min(m,n) bounds; expected to fail",
            defaults: grid_samples(8, 1),
            build: build_rotated_product_reversed,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.shift",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.shift",
            description: "shifted H_{m,n} as a double series in the shift, |w| <= 0.5",
            defaults: Defaults {
                max_index: Some(8),
                samples: Some(1),
                degree_cap: Some(25),
                ..Defaults::default()
            },
            degree_cap_limit: Some(80),
            build: build_shift,
            ..base.clone()
        },
        SuiteInfo {
            id: "mixed.origin",
            module: "integral_reps",
            operation: "check_mixed_relations",
            tag: "mixed.origin",
            description: "H_{m,n}(0,0) = delta_{mn} (-1)^n n!",
            defaults: grid(8),
            build: build_origin,
            ..base.clone()
        },
        SuiteInfo {
            id: "q.gf",
            module: "q_series",
            operation: "gf_h2d_q_check",
            tag: "q.generating_function",
            description: "truncated generating function of the 2D q-Hermite polynomials against (uv;q)_inf/(uz1, vz2;q)_inf",
            tolerance: 1e-10,
            defaults: Defaults {
                samples: Some(5),
                degree_cap: Some(40),
                q: Some(vec![0.3, 0.5, 0.7]),
                ..Defaults::default()
            },
            degree_cap_limit: Some(150),
            build: build_q_gf,
            ..base.clone()
        },
        SuiteInfo {
            id: "q.awi",
            module: "q_series",
            operation: "askey_wilson_integral",
            tag: "q.askey_wilson",
            description: "Askey-Wilson integral by the trapezoid rule against its closed form, max |t| <= 0.6",
            tolerance: 1e-8,
            defaults: Defaults {
                samples: Some(20),
                q: Some(vec![0.3, 0.5, 0.7]),
                points: Some(512),
                ..Defaults::default()
            },
            build: build_q_awi,
            ..base.clone()
        },
        SuiteInfo {
            id: "q.moments",
            module: "q_series",
            operation: "q_moments_check",
            tag: "q.hermite_moments",
            description: "moments of the q-Hermite weight for j <= max_index; the note names the normalization that matched",
            tolerance: 1e-10,
            defaults: Defaults {
                max_index: Some(8),
                q: Some(vec![0.3, 0.5, 0.7]),
                points: Some(64),
                ..Defaults::default()
            },
            build: build_q_moments,
            ..base.clone()
        },
        SuiteInfo {
            id: "q.asc",
            module: "q_series",
            operation: "thm_asc_check",
            tag: "q.two_function_product",
            description: "product of two q-Hermite generating functions: closed form against the four-fold series and against quadrature",
            tolerance: 1e-6,
            defaults: Defaults {
                samples: Some(2),
                degree_cap: Some(24),
                q: Some(vec![0.3, 0.5, 0.7]),
                points: Some(128),
                ..Defaults::default()
            },
            degree_cap_limit: Some(60),
            build: build_q_asc,
            ..base.clone()
        },
        SuiteInfo {
            id: "q.qks",
            module: "q_series",
            operation: "qks_check",
            tag: "q.four_function_product",
            description: "product of four q-Hermite generating functions: closed form against the eight-fold series and against quadrature",
            tolerance: 1e-5,
            defaults: Defaults {
                samples: Some(2),
                degree_cap: Some(16),
                q: Some(vec![0.5]),
                points: Some(128),
                ..Defaults::default()
            },
            degree_cap_limit: Some(24),
            build: build_q_qks,
            ..base
        },
    ]
}

fn build_h2d_routes(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "poly.h2d.routes", "pairs");
    let max = s.max_index;
    (0..s.samples)
        .map(|i| {
            let z1 = rng.disk(2.0);
            let z2 = rng.disk(2.0);
            Case::new(
                json!({"sample": i, "z1": cj(z1), "z2": cj(z2), "max_index": max}),
                move || {
                    let mut worst: Option<(f64, u32, u32, Complex64, Complex64)> = None;
                    for m in 0..=max {
                        for n in 0..=max {
                            let idx = PolyIndex::new(m, n);
                            let d = poly::h2d_direct(idx, z1, z2);
                            let l = poly::h2d_laguerre(idx, z1, z2);
                            let rel = (d - l).norm() / (1.0 + d.norm());
                            if worst.is_none_or(|w| rel > w.0) {
                                worst = Some((rel, m, n, d, l));
                            }
                        }
                    }
                    let (_, m, n, d, l) = worst.expect("grid is not empty");
                    Ok(Eval::new(d, l).note(format!("worst at m={m}, n={n}")))
                },
            )
        })
        .collect()
}

fn build_h2d_gf(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "poly.h2d.gf", "points");
    let cap = s.degree_cap;
    (0..s.samples)
        .map(|i| {
            let (z1, z2, u, v) = (rng.disk(1.0), rng.disk(1.0), rng.disk(0.5), rng.disk(0.5));
            Case::new(
                json!({"sample": i, "z1": cj(z1), "z2": cj(z2), "u": cj(u), "v": cj(v), "degree_cap": cap}),
                move || {
                    let lhs = (u * z1 + v * z2 - u * v).exp();
                    Ok(Eval::new(lhs, poly::gf_h2d_partial(z1, z2, u, v, cap)).degree(cap))
                },
            )
        })
        .collect()
}

fn build_charlier(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "poly.charlier.bilinear", "grid");
    let cap = s.degree_cap;
    (0..s.samples)
        .map(|i| {
            let x = (rng.index(3) + 1) as f64;
            let y = (rng.index(3) + 1) as f64;
            let b = x * y / 8.0;
            let u = rng.uniform(-b, b);
            let v = rng.uniform(-b, b);
            Case::new(
                json!({"sample": i, "u": u, "v": v, "x": x, "y": y, "degree_cap": cap}),
                move || {
                    let r = ks::charlier_bilinear_check(u, v, x, y, cap)?;
                    Ok(Eval::new(c(r.lhs), c(r.rhs)).degree(cap))
                },
            )
        })
        .collect()
}

fn build_ks_real(s: &Settings, seed: u64) -> Vec<Case> {
    let policy = s.truncation;
    let mut out = Vec::new();
    for &n in &s.dims {
        let mut rng = corpus(seed, "ks.real.identity", format!("N={n}"));
        for i in 0..s.samples {
            let m = rng.symmetric_matrix(n, 0.3);
            let x: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            out.push(Case::new(
                json!({"dim": n, "sample": i, "s": m, "x": x}),
                move || {
                    let lhs = ks::lhs_real(&m, &x)?;
                    let r = ks::rhs_real(&m, &x, &policy)?;
                    Ok(Eval::new(c(lhs), r.value).degree(r.degree_reached))
                },
            ));
        }
    }
    out
}

fn complex_corpus(
    seed: u64,
    n: usize,
    samples: usize,
) -> Vec<(ComplexSquareMatrix, Vec<Complex64>)> {
    let mut rng = corpus(seed, "ks.complex.identity", format!("N={n}"));
    (0..samples)
        .map(|_| {
            let h = rng.complex_matrix(n, 0.8 / n as f64);
            let w: Vec<Complex64> = (0..n).map(|_| rng.disk(1.5)).collect();
            (h, w)
        })
        .collect()
}

fn complex_identity_case(
    params: Value,
    h: ComplexSquareMatrix,
    w: Vec<Complex64>,
    policy: TruncationPolicy,
) -> Case {
    Case::new(params, move || {
        let r = ks::rhs_complex(&h, &w, &policy)?;
        let (det, exponent) = ks::complex_kernel_parts(&h, &w)?;
        Ok(Eval::new(exponent.exp(), det * r.value)
            .degree(r.degree_reached)
            .note(format!("{:?}", r.domain)))
    })
}

fn build_ks_complex(s: &Settings, seed: u64) -> Vec<Case> {
    let mut out = Vec::new();
    for &n in &s.dims {
        for (i, (h, w)) in complex_corpus(seed, n, s.samples).into_iter().enumerate() {
            let params = json!({"dim": n, "sample": i, "h": matrix_json(&h), "w": cjv(&w)});
            out.push(complex_identity_case(params, h, w, s.truncation));
        }
    }
    out
}

fn build_ks_hermitian(s: &Settings, seed: u64) -> Vec<Case> {
    let mut out = Vec::new();
    for &n in &s.dims {
        let mut rng = corpus(seed, "ks.complex.hermitian", format!("N={n}"));
        for i in 0..s.samples {
            let h = rng.hermitian_matrix(n, 0.5);
            let w: Vec<Complex64> = (0..n).map(|_| rng.disk(1.5)).collect();
            let params = json!({"dim": n, "sample": i, "h": matrix_json(&h), "w": cjv(&w)});
            out.push(complex_identity_case(params, h, w, s.truncation));
        }
    }
    out
}

fn build_ks_laguerre(s: &Settings, seed: u64) -> Vec<Case> {
    let policy = s.truncation;
    let mut out = Vec::new();
    for &n in &s.dims {
        for (i, (h, w)) in complex_corpus(seed, n, s.samples).into_iter().enumerate() {
            let params = json!({"dim": n, "sample": i, "h": matrix_json(&h), "w": cjv(&w)});
            out.push(Case::new(params, move || {
                if w.iter().any(|z| z.norm() == 0.0) {
                    return Err(Error::DomainViolation(
                        "the Laguerre form needs w_j != 0".into(),
                    ));
                }
                let polar: Vec<PolarPoint> =
                    w.iter().map(|&z| PolarPoint::from_complex(z)).collect();
                let a = ks::rhs_complex(&h, &w, &policy)?;
                let b = ks::rhs_laguerre(&h, &polar, &policy)?;
                Ok(Eval::new(a.value, b.value).degree(a.degree_reached.max(b.degree_reached)))
            }));
        }
    }
    out
}

fn build_bound(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "poly.h2d.bound", "points");
    let max = s.max_index;
    (0..s.samples)
        .map(|i| {
            let z = rng.disk(2.0);
            Case::new(
                json!({"sample": i, "z": cj(z), "max_index": max}),
                move || {
                    let table = poly::h2d_table(max, z.conj(), z);
                    let growth = z.norm_sqr().exp();
                    let mut worst = (0.0f64, 0, 0);
                    for m in 0..=max {
                        for n in 0..=max {
                            let bound = growth * (poly::factorial(m) * poly::factorial(n)).sqrt();
                            let ratio = table[m as usize][n as usize].norm() / bound;
                            if ratio > worst.0 {
                                worst = (ratio, m, n);
                            }
                        }
                    }
                    let (ratio, m, n) = worst;
                    let mut e =
                        Eval::new(c(ratio), c(1.0)).note(format!("largest ratio at m={m}, n={n}"));
                    e.abs_err = (ratio - 1.0).max(0.0);
                    Ok(e)
                },
            )
        })
        .collect()
}

fn build_expansion_real(s: &Settings, seed: u64) -> Vec<Case> {
    let policy = s.truncation;
    let mut out = Vec::new();
    for &n in &s.dims {
        let mut rng = corpus(seed, "ks.expansion.real", format!("N={n}"));
        for i in 0..s.samples {
            let m = rng.symmetric_matrix(n, 1.0);
            let y: Vec<Complex64> = (0..n).map(|_| rng.disk(1.0)).collect();
            out.push(Case::new(
                json!({"dim": n, "sample": i, "s": m, "y": cjv(&y)}),
                move || {
                    let lhs = ks::quadratic_exp_real(&m, &y)?;
                    let r = ks::quadratic_series_real(&m, &y, &policy)?;
                    Ok(Eval::new(lhs, r.value).degree(r.degree_reached))
                },
            ));
        }
    }
    out
}

fn build_expansion_complex(s: &Settings, seed: u64) -> Vec<Case> {
    let policy = s.truncation;
    let mut out = Vec::new();
    for &n in &s.dims {
        let mut rng = corpus(seed, "ks.expansion.complex", format!("N={n}"));
        for i in 0..s.samples {
            let h = rng.complex_matrix(n, 0.5);
            let z: Vec<Complex64> = (0..n).map(|_| rng.disk(1.0)).collect();
            let params = json!({"dim": n, "sample": i, "h": matrix_json(&h), "z": cjv(&z)});
            out.push(Case::new(params, move || {
                let lhs = ks::quadratic_exp_complex(&h, &z)?;
                let r = ks::quadratic_series_complex(&h, &z, &policy)?;
                Ok(Eval::new(lhs, r.value).degree(r.degree_reached))
            }));
        }
    }
    out
}

const MOMENT_X: [f64; 6] = [-1.2, -0.3, 0.0, 0.4, 0.7, 1.5];

fn build_hermite_moment(s: &Settings, _seed: u64) -> Vec<Case> {
    let sp = spec(QuadratureKind::GaussHermite1d, s.points);
    let mut out = Vec::new();
    for n in 0..=s.max_index {
        for &x in &MOMENT_X {
            out.push(Case::new(json!({"n": n, "x": x}), move || {
                Ok(integral::check_hermite_moment(n, x, &sp)?.into())
            }));
        }
    }
    out
}

fn index_pairs(max: u32) -> impl Iterator<Item = (u32, u32)> {
    (0..=max).flat_map(move |m| (0..=max).map(move |n| (m, n)))
}

fn build_h2d_moment(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "integral.h2d_moment", "points");
    let sp = spec(QuadratureKind::GaussHermite2dTensor, s.points);
    let mut out = Vec::new();
    for (m, n) in index_pairs(s.max_index) {
        for i in 0..s.samples {
            let (z1, z2) = (rng.disk(1.0), rng.disk(1.0));
            out.push(Case::new(
                json!({"m": m, "n": n, "sample": i, "z1": cj(z1), "z2": cj(z2)}),
                move || Ok(integral::check_h2d_moment(m, n, z1, z2, &sp)?.into()),
            ));
        }
    }
    out
}

fn build_h2d_moment_conjugate(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "integral.h2d_moment_conjugate", "points");
    let sp = spec(QuadratureKind::GaussHermite2dTensor, s.points);
    let mut out = Vec::new();
    for (m, n) in index_pairs(s.max_index) {
        for i in 0..s.samples {
            let z = rng.disk(1.0);
            out.push(Case::new(
                json!({"m": m, "n": n, "sample": i, "z": cj(z)}),
                move || Ok(integral::check_h2d_moment_conjugate(m, n, z, &sp)?.into()),
            ));
        }
    }
    out
}

fn build_circle(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "integral.circle", "points");
    let p = s.points;
    let mut out = Vec::new();
    for (m, n) in index_pairs(s.max_index) {
        for i in 0..s.samples {
            let r1 = rng.uniform(0.2, 1.5);
            let t1 = rng.uniform(0.0, 2.0 * PI);
            let r2 = rng.uniform(0.2, 1.5);
            let t2 = rng.uniform(0.0, 2.0 * PI);
            out.push(Case::new(
                json!({"m": m, "n": n, "sample": i, "r1": r1, "theta1": t1, "r2": r2, "theta2": t2}),
                move || Ok(integral::check_circle_rep(m, n, r1, t1, r2, t2, p)?.into()),
            ));
        }
    }
    out
}

fn build_circle_conjugate(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "integral.circle_conjugate", "points");
    let p = s.points;
    let mut out = Vec::new();
    for (m, n) in index_pairs(s.max_index) {
        for i in 0..s.samples {
            let r = rng.uniform(0.2, 1.5);
            let t = rng.uniform(0.0, 2.0 * PI);
            out.push(Case::new(
                json!({"m": m, "n": n, "sample": i, "r": r, "theta": t}),
                move || Ok(integral::check_circle_rep_conjugate(m, n, r, t, p)?.into()),
            ));
        }
    }
    out
}

const CIRCLE_RADII: [f64; 3] = [0.3, 0.8, 1.5];

fn build_circle_laguerre(s: &Settings, _seed: u64) -> Vec<Case> {
    let p = s.points;
    let mut out = Vec::new();
    for (m, n) in index_pairs(s.max_index) {
        for &r in &CIRCLE_RADII {
            out.push(Case::new(json!({"m": m, "n": n, "r": r}), move || {
                Ok(integral::check_circle_rep_laguerre(m, n, r, p)?.into())
            }));
        }
    }
    out
}

fn build_circle_fourier(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "integral.circle_fourier", "points");
    let p = s.points;
    let mut out = Vec::new();
    for (m, n) in index_pairs(s.max_index) {
        for i in 0..s.samples {
            let (z1, z2) = (rng.disk(1.5), rng.disk(1.5));
            out.push(Case::new(
                json!({"m": m, "n": n, "sample": i, "z1": cj(z1), "z2": cj(z2)}),
                move || Ok(integral::check_circle_rep_fourier(m, n, z1, z2, p)?.into()),
            ));
        }
    }
    out
}

fn build_normal_real(s: &Settings, seed: u64) -> Vec<Case> {
    let sp = spec(QuadratureKind::GaussHermite2dTensor, s.points);
    let mut out = Vec::new();
    for &n in &s.dims {
        let mut rng = corpus(seed, "integral.normal_real", format!("N={n}"));
        for i in 0..s.samples {
            let a = rng.spd_matrix(n, 0.6, 0.5);
            let b: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            out.push(Case::new(
                json!({"dim": n, "sample": i, "a": a, "b": b}),
                move || Ok(integral::check_normal_integral_real(&a, &b, &sp)?.into()),
            ));
        }
    }
    out
}

fn build_normal_complex(s: &Settings, seed: u64) -> Vec<Case> {
    let sp = spec(QuadratureKind::GaussHermite2dTensor, s.points);
    let mut out = Vec::new();
    for &n in &s.dims {
        let mut rng = corpus(seed, "integral.normal_complex", format!("N={n}"));
        for i in 0..s.samples {
            let h = rng.hermitian_matrix(n, 0.5);
            let w: Vec<Complex64> = (0..n).map(|_| rng.disk(1.0)).collect();
            let params = json!({"dim": n, "sample": i, "h": matrix_json(&h), "w": cjv(&w)});
            out.push(Case::new(params, move || {
                Ok(integral::check_normal_integral_complex(&h, &w, &sp)?.into())
            }));
        }
    }
    out
}

fn mixed_case(params: Value, case: MixedRelation, points: usize) -> Case {
    Case::new(params, move || {
        Ok(integral::check_mixed_relations(&case, points)?.into())
    })
}

fn build_split_sum(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "mixed.split_sum", "points");
    let mut out = Vec::new();
    for n in 0..=s.max_index {
        for i in 0..s.samples {
            let (w1, w2) = (rng.disk(1.0), rng.disk(1.0));
            let z = polar_in(&mut rng, 0.3, 1.5);
            let params = json!({"n": n, "sample": i, "w1": cj(w1), "w2": cj(w2), "z": cj(z)});
            out.push(mixed_case(
                params,
                MixedRelation::SplitSum { n, w1, w2, z },
                0,
            ));
        }
    }
    out
}

fn build_laguerre_sum(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "mixed.laguerre_sum", "points");
    let mut out = Vec::new();
    for n in 0..=s.max_index {
        for i in 0..s.samples {
            let rho = rng.uniform(0.3, 1.5);
            let z = polar_in(&mut rng, 0.5, 1.5);
            let params = json!({"n": n, "sample": i, "rho": rho, "z": cj(z)});
            out.push(mixed_case(
                params,
                MixedRelation::LaguerreSum { n, rho, z },
                0,
            ));
        }
    }
    out
}

fn build_cosine_laguerre(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "mixed.cosine_laguerre", "points");
    let mut out = Vec::new();
    for n in 0..=s.max_index {
        for i in 0..s.samples {
            let rho = rng.uniform(0.3, 1.5);
            let theta = rng.uniform(0.0, 2.0 * PI);
            let params = json!({"n": n, "sample": i, "rho": rho, "theta": theta});
            out.push(mixed_case(
                params,
                MixedRelation::CosineLaguerre { n, rho, theta },
                0,
            ));
        }
    }
    out
}

fn build_fourier_coefficient(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "mixed.fourier_coefficient", "points");
    let mut out = Vec::new();
    for n in 0..=s.max_index {
        for i in 0..s.samples {
            let rho = rng.uniform(0.3, 1.5);
            for k in -(n as i32)..=(n as i32) {
                let params = json!({"n": n, "k": k, "sample": i, "rho": rho});
                out.push(mixed_case(
                    params,
                    MixedRelation::FourierCoefficient { n, k, rho },
                    s.points,
                ));
            }
        }
    }
    out
}

fn squared_average(s: &Settings, seed: u64, id: &str, power: RhoPower) -> Vec<Case> {
    let mut rng = corpus(seed, id, "points");
    let mut out = Vec::new();
    for n in 0..=s.max_index {
        for i in 0..s.samples {
            let rho = rng.uniform(0.3, 1.5);
            let params = json!({"n": n, "sample": i, "rho": rho});
            out.push(mixed_case(
                params,
                MixedRelation::SquaredAverage { n, rho, power },
                s.points,
            ));
        }
    }
    out
}

fn build_squared_average(s: &Settings, seed: u64) -> Vec<Case> {
    squared_average(s, seed, "mixed.squared_average", RhoPower::Four)
}

fn build_squared_average_low(s: &Settings, seed: u64) -> Vec<Case> {
    squared_average(s, seed, "mixed.squared_average.low_power", RhoPower::Two)
}

fn rotated_product(
    s: &Settings,
    seed: u64,
    id: &str,
    phase: RotationPhase,
    bounds: IndexBounds,
) -> Vec<Case> {
    let mut rng = corpus(seed, id, "points");
    let mut out = Vec::new();
    for (m, n) in index_pairs(s.max_index) {
        for i in 0..s.samples {
            let (w1, w2) = (rng.disk(1.0), rng.disk(1.0));
            let params = json!({"m": m, "n": n, "sample": i, "w1": cj(w1), "w2": cj(w2)});
            out.push(mixed_case(
                params,
                MixedRelation::RotatedProduct {
                    m,
                    n,
                    w1,
                    w2,
                    phase,
                    bounds,
                },
                0,
            ));
        }
    }
    out
}

fn build_rotated_product(s: &Settings, seed: u64) -> Vec<Case> {
    rotated_product(
        s,
        seed,
        "mixed.rotated_product",
        RotationPhase::Forward,
        IndexBounds::Full,
    )
}

fn build_rotated_product_reversed(s: &Settings, seed: u64) -> Vec<Case> {
    rotated_product(
        s,
        seed,
        "mixed.rotated_product.reversed",
        RotationPhase::Reversed,
        IndexBounds::Min,
    )
}

fn build_shift(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "mixed.shift", "points");
    let cap = s.degree_cap;
    let mut out = Vec::new();
    for (m, n) in index_pairs(s.max_index) {
        for i in 0..s.samples {
            let (z1, z2) = (rng.disk(1.0), rng.disk(1.0));
            let (w1, w2) = (rng.disk(0.5), rng.disk(0.5));
            let params = json!({"m": m, "n": n, "sample": i, "z1": cj(z1), "z2": cj(z2),
                "w1": cj(w1), "w2": cj(w2), "degree_cap": cap});
            let case = MixedRelation::Shift {
                m,
                n,
                z1,
                z2,
                w1,
                w2,
                cap,
            };
            out.push(Case::new(params, move || {
                Ok(Eval::from(integral::check_mixed_relations(&case, 0)?).degree(cap))
            }));
        }
    }
    out
}

fn build_origin(s: &Settings, _seed: u64) -> Vec<Case> {
    index_pairs(s.max_index)
        .map(|(m, n)| mixed_case(json!({"m": m, "n": n}), MixedRelation::Origin { m, n }, 0))
        .collect()
}

fn build_q_gf(s: &Settings, seed: u64) -> Vec<Case> {
    let cap = s.degree_cap;
    let mut out = Vec::new();
    for &qv in &s.q {
        let mut rng = corpus(seed, "q.gf", format!("q={qv}"));
        for i in 0..s.samples {
            let (z1, z2, u, v) = (rng.disk(1.0), rng.disk(1.0), rng.disk(0.4), rng.disk(0.4));
            let params = json!({"q": qv, "sample": i, "z1": cj(z1), "z2": cj(z2), "u": cj(u),
                "v": cj(v), "degree_cap": cap});
            out.push(Case::new(params, move || {
                let q = QParameter::new(qv)?;
                Ok(Eval::from(qseries::gf_h2d_q_check(z1, z2, u, v, &q, cap)?).degree(cap))
            }));
        }
    }
    out
}

fn build_q_awi(s: &Settings, seed: u64) -> Vec<Case> {
    let mut rng = corpus(seed, "q.awi", "points");
    let p = s.points;
    (0..s.samples)
        .map(|i| {
            let qv = s.q[i % s.q.len()];
            let t = [rng.disk(0.6), rng.disk(0.6), rng.disk(0.6), rng.disk(0.6)];
            Case::new(json!({"q": qv, "sample": i, "t": cjv(&t)}), move || {
                let q = QParameter::new(qv)?;
                Ok(qseries::askey_wilson_integral(t, &q, p)?.into())
            })
        })
        .collect()
}

fn build_q_moments(s: &Settings, _seed: u64) -> Vec<Case> {
    let p = s.points;
    let mut out = Vec::new();
    for &qv in &s.q {
        for j in 0..=s.max_index as i64 {
            out.push(Case::new(json!({"q": qv, "j": j}), move || {
                let q = QParameter::new(qv)?;
                let m = qseries::q_moments_check(j, &q, p)?;
                let note = serde_json::to_value(m.normalization)
                    .ok()
                    .and_then(|v| v.as_str().map(|s| format!("normalization: {s}")))
                    .unwrap_or_default();
                Ok(Eval::from(m.comparison).note(note))
            }));
        }
    }
    out
}

fn build_q_asc(s: &Settings, seed: u64) -> Vec<Case> {
    let (cap, p) = (s.degree_cap, s.points);
    let mut out = Vec::new();
    for &qv in &s.q {
        let mut rng = corpus(seed, "q.asc", format!("q={qv}"));
        for i in 0..s.samples {
            let (z1, z2) = (rng.disk(0.5), rng.disk(0.5));
            let r = rng.uniform(0.1, 0.3);
            let sv = rng.uniform(0.1, 0.3);
            for against in ["series", "quadrature"] {
                let params = json!({"q": qv, "sample": i, "z1": cj(z1), "z2": cj(z2), "r": r,
                    "s": sv, "degree_cap": cap, "against": against});
                out.push(Case::new(params, move || {
                    let q = QParameter::new(qv)?;
                    let res = qseries::thm_asc_check(z1, z2, r, sv, &q, cap, p)?;
                    Ok(pick_product(res, against))
                }));
            }
        }
    }
    out
}

fn pick_product(res: qseries::ProductCheck, against: &str) -> Eval {
    if against == "series" {
        Eval::from(res.series).degree(res.degree_cap).note(format!(
            "{} terms, tail {:.1e}",
            res.term_count, res.tail_estimate
        ))
    } else {
        Eval::from(res.quadrature)
    }
}

fn build_q_qks(s: &Settings, seed: u64) -> Vec<Case> {
    let (cap, p) = (s.degree_cap, s.points);
    let mut out = Vec::new();
    for &qv in &s.q {
        let mut rng = corpus(seed, "q.qks", format!("q={qv}"));
        for i in 0..s.samples {
            let z = [rng.disk(1.0), rng.disk(1.0), rng.disk(1.0), rng.disk(1.0)];
            let (r1, r2) = (rng.uniform(0.05, 0.15), rng.uniform(0.05, 0.15));
            let (s1, s2) = (rng.uniform(0.05, 0.15), rng.uniform(0.05, 0.15));
            for against in ["series", "quadrature"] {
                let params = json!({"q": qv, "sample": i, "z": cjv(&z), "r1": r1, "r2": r2,
                    "s1": s1, "s2": s2, "degree_cap": cap, "against": against});
                out.push(Case::new(params, move || {
                    let q = QParameter::new(qv)?;
                    let res = qseries::qks_check(z, r1, r2, s1, s2, &q, cap, p)?;
                    Ok(pick_product(res, against))
                }));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn catalog_is_well_formed() {
        let cat = catalog();
        assert!(cat.len() >= 15);
        let ids: BTreeSet<_> = cat.iter().map(|s| s.id).collect();
        assert_eq!(ids.len(), cat.len());
        for s in &cat {
            assert!(
                !s.tag.is_empty() && !s.module.is_empty() && s.tolerance > 0.0,
                "{}",
                s.id
            );
        }
    }
}
