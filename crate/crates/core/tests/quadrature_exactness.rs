use ultracc_core::orthopoly::{eval_orthonormal_all, weight_mass, UltraParam};
use ultracc_core::quadrature::{gauss_gegenbauer, integrate, shift_to_unit};

const LAMBDAS: [f64; 5] = [0.25, 0.5, 1.0, 1.5, 3.0];

fn lam(x: f64) -> UltraParam {
    UltraParam::new(x).unwrap()
}

#[test]
fn monomial_moments_match_beta_values() {
    for &l in &LAMBDAS {
        for n in [1usize, 2, 3, 7, 16, 33, 64, 100, 128] {
            let rule = gauss_gegenbauer(lam(l), n).unwrap();
            // even moments: M_{2m+2} = M_{2m} (m+1/2)/(m+λ+1)
            let mut moment = weight_mass(lam(l)).to_real();
            for k in 0..=(2 * n - 1) {
                let got = integrate(&rule, |t| t.powi(k as i32));
                if k % 2 == 0 {
                    assert!(
                        (got - moment).abs() <= 1e-12 * moment,
                        "λ={l} n={n} k={k}: {got} vs {moment}"
                    );
                    let m = (k / 2) as f64;
                    moment *= (m + 0.5) / (m + l + 1.0);
                } else {
                    let scale = integrate(&rule, |t| t.abs().powi(k as i32));
                    assert!(got.abs() <= 1e-12 * scale, "odd moment λ={l} n={n} k={k}");
                }
            }
        }
    }
}

#[test]
fn nodes_interlace_and_weights_positive() {
    for &l in &LAMBDAS {
        let mut prev = gauss_gegenbauer(lam(l), 1).unwrap();
        for n in 2..=64 {
            let rule = gauss_gegenbauer(lam(l), n).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(rule.nodes[0] > -1.0 && rule.nodes[n - 1] < 1.0);
            for k in 0..n - 1 {
                assert!(rule.nodes[k] < prev.nodes[k] && prev.nodes[k] < rule.nodes[k + 1]);
            }
            prev = rule;
        }
    }
}

#[test]
fn orthonormality_up_to_degree_sixty() {
    for &l in &LAMBDAS {
        let rule = gauss_gegenbauer(lam(l), 62).unwrap();
        let tables: Vec<Vec<f64>> = rule.nodes.iter().map(|&t| eval_orthonormal_all(lam(l), 60, t)).collect();
        for k in 0..=60 {
            for m in 0..=k {
                let mut idx = 0;
                let got = integrate(&rule, |_| {
                    let v = tables[idx][k] * tables[idx][m];
                    idx += 1;
                    v
                });
                let want = if k == m { 1.0 } else { 0.0 };
                assert!((got - want).abs() <= 1e-11, "λ={l} ({k},{m}) {got}");
            }
        }
    }
}

#[test]
fn shifted_family_is_orthogonal_with_norm_four_to_minus_lambda() {
    for &l in &LAMBDAS {
        let rule = shift_to_unit(&gauss_gegenbauer(lam(l), 20).unwrap());
        for k in 0..15 {
            for m in 0..=k {
                let got = integrate(&rule, |x| {
                    let p = eval_orthonormal_all(lam(l), k, 2.0 * x - 1.0);
                    p[k] * p[m]
                });
                let want = if k == m { libm::exp2(-2.0 * l) } else { 0.0 };
                assert!((got - want).abs() <= 1e-12, "λ={l} ({k},{m})");
            }
        }
    }
}
