use gfz_core::generators::{connected_random, path};
use gfz_core::normalize::{normalize, NormKind};
use gfz_core::sampler::{empirical_transition, row_tv, sample_walks, sample_walks_2nd, window_cooccurrence};
use nalgebra::DMatrix;

#[test]
fn p3_transition_estimate() {
    let g = path(3).unwrap();
    let c = sample_walks(&g, 101, 334, 5).unwrap();
    assert!(c.steps() >= 100_000 && c.follows_edges(&g));
    let p = normalize(&g, NormKind::RwLeft).unwrap().to_dense();
    let tv = row_tv(&empirical_transition(&c).matrix, &p).unwrap();
    assert!(tv.iter().all(|&t| t <= 0.02), "{tv:?}");
}

#[test]
fn large_in_out_parameter_forces_backtracking_on_a_path() {
    let g = path(6).unwrap();
    let c = sample_walks_2nd(&g, 1.0, 1e6, 40, 50, 8).unwrap();
    let (mut back, mut total) = (0.0, 0.0);
    for w in &c.walks {
        for s in w.windows(3) {
            total += 1.0;
            if s[0] == s[2] {
                back += 1.0;
            }
        }
    }
    assert!(back / total >= 0.99, "{}", back / total);
}

#[test]
fn window_cooccurrence_matches_averaged_powers() {
    let g = connected_random(12, 3.0, 4).unwrap();
    let t = 3;
    // 12 nodes × 840 walks × 100 full windows ≈ 10⁶ windows
    let c = sample_walks(&g, 100 + t, 840, 19).unwrap();
    let co = window_cooccurrence(&c, t).unwrap();
    let p = normalize(&g, NormKind::RwLeft).unwrap().to_dense();
    let mut acc = DMatrix::zeros(12, 12);
    let mut pow = DMatrix::identity(12, 12);
    for _ in 0..t {
        pow = &pow * &p;
        acc += &pow;
    }
    acc /= t as f64;
    let tv = row_tv(&co.matrix, &acc).unwrap();
    assert!(tv.iter().all(|&v| v <= 0.05), "{tv:?}");
}
