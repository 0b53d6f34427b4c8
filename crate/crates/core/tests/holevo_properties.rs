use gmem_core::holevo::{
    chi_coherent_baseline, chi_for_ensemble, chi_memory_channel, chi_one_mode_symmetric, chi_with_unraveling,
    ensemble_in_channel_modes, kkt_residual, waterfill, waterfill_chi, PhotonBudget,
};
use gmem_core::models::{zoo, Family, ModelConfig};
use gmem_core::unravel::{phase_symmetry, unravel, UnravelingResult};
use gmem_core::{g_function, g_prime, random, Ordering};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lossy_blocks(etas: &[f64]) -> Vec<(f64, f64)> {
    etas.iter().map(|&e| (e.sqrt(), (1.0 - e) / 2.0)).collect()
}

#[test]
fn waterfill_matches_grid_search_on_three_lossy_blocks() {
    let blocks = lossy_blocks(&[0.9, 0.5, 0.1]);
    let budget = PhotonBudget::new(1.0, 3).unwrap();
    let alloc = waterfill(&blocks, budget).unwrap();
    let chi = waterfill_chi(&blocks, &alloc);

    // exhaustive grid over N_1 + N_2 + N_3 = 3 at step 1e-3
    let steps = 3000;
    let h = 3.0 / steps as f64;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=steps {
        for j in 0..=(steps - i) {
            let n = [i as f64 * h, j as f64 * h, (steps - i - j) as f64 * h];
            let v: f64 = blocks.iter().zip(n).map(|(&(x, y), nk)| chi_one_mode_symmetric(x, y, nk).unwrap()).sum();
            best = best.max(v / 3.0);
        }
    }
    assert!(chi >= best - 1e-12);
    assert!((chi - best).abs() <= 1e-5, "{chi} vs {best}");
    assert!(kkt_residual(&blocks, &alloc) <= 1e-7);
    assert!((alloc.mean() - 1.0).abs() <= 1e-9);
}

proptest! {
    #[test]
    fn waterfill_meets_budget_and_kkt(
        etas in prop::collection::vec(0.01f64..1.0, 1..7),
        extra in prop::collection::vec(0.0f64..2.0, 7),
        n_photons in 0.0f64..10.0,
    ) {
        let blocks: Vec<(f64, f64)> = etas.iter().zip(&extra).map(|(&e, &t)| (e.sqrt(), (1.0 - e) * (t + 0.5))).collect();
        let alloc = waterfill(&blocks, PhotonBudget::new(n_photons, blocks.len()).unwrap()).unwrap();
        prop_assert!((alloc.mean() - n_photons).abs() <= 1e-9);
        prop_assert!(alloc.photons.iter().all(|&p| p >= 0.0));
        prop_assert!(kkt_residual(&blocks, &alloc) <= 1e-7);
    }

    #[test]
    fn g_prime_is_the_derivative_of_g(t in 0.01f64..50.0) {
        let h = 1e-6 * t.max(1.0);
        let fd = (g_function(t + h).unwrap() - g_function(t - h).unwrap()) / (2.0 * h);
        prop_assert!((fd - g_prime(t)).abs() <= 1e-6 * g_prime(t).max(1.0));
    }
}

#[test]
fn chi_is_nondecreasing_in_budget() {
    for cfg in zoo(4) {
        let ch = cfg.build().unwrap();
        let mut last = f64::NEG_INFINITY;
        for n_photons in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let chi = chi_memory_channel(&ch, PhotonBudget::new(n_photons, 4).unwrap()).unwrap().chi;
            assert!(chi >= last - 1e-9, "{cfg:?} at N={n_photons}: {chi} < {last}");
            last = chi;
        }
    }
}

#[test]
fn chi_is_invariant_under_dressing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let budget = PhotonBudget::new(1.5, 4).unwrap();
    for cfg in zoo(4) {
        let ch = cfg.build().unwrap();
        let ur = unravel(&ch).unwrap();
        let reference = chi_with_unraveling(&ur, budget).unwrap().chi;
        let a = random::symplectic_orthogonal(&mut rng, 4, Ordering::Blocked);
        let b = random::symplectic_orthogonal(&mut rng, 4, Ordering::Blocked);
        let dressed = ch.dress(&a, &b).unwrap();
        let enc = a.inverse().mul(&ur.encoding.convert_ordering(Ordering::Blocked));
        let dec = ur.decoding.convert_ordering(Ordering::Blocked).mul(&b.inverse());
        let ur2 = UnravelingResult::from_pair(&dressed, enc, dec).unwrap();
        assert!(ur2.residual <= 1e-9);
        let chi = chi_with_unraveling(&ur2, budget).unwrap().chi;
        assert!((chi - reference).abs() <= 1e-6, "{cfg:?}: {chi} vs {reference}");
    }
}

#[test]
fn optimal_ensemble_reproduces_chi_in_channel_modes() {
    let budget = PhotonBudget::new(2.0, 4).unwrap();
    for cfg in zoo(4) {
        let ch = cfg.build().unwrap();
        let ur = unravel(&ch).unwrap();
        let res = chi_with_unraveling(&ur, budget).unwrap();
        let (input, modulation) = ensemble_in_channel_modes(&ur, &res);
        assert!(budget.admits(&(input.matrix() + &modulation), 1e-9));
        let direct = chi_for_ensemble(&ch, &input, &modulation).unwrap();
        assert!((direct - res.chi).abs() <= 1e-8, "{cfg:?}: {direct} vs {}", res.chi);
    }
}

#[test]
fn symmetric_channels_have_coherent_optimal_inputs() {
    for n in [2, 4, 8] {
        for cfg in zoo(n) {
            let ch = cfg.build().unwrap();
            if !phase_symmetry(&ch).unwrap().channel_symmetric {
                continue;
            }
            let budget = PhotonBudget::new(2.0, n).unwrap();
            let res = chi_memory_channel(&ch, budget).unwrap();
            let coherent = chi_coherent_baseline(&ch, budget).unwrap();
            assert!(!res.entangled_inputs, "{cfg:?}");
            assert!((res.chi - coherent).abs() <= 1e-6, "{cfg:?}");
        }
    }
}

#[test]
fn squeezed_environment_favours_entangled_inputs() {
    let budget = PhotonBudget::new(2.0, 6).unwrap();
    let ch = ModelConfig::new(Family::LossyCorrelatedEnv, 6).with("s", 0.4).build().unwrap();
    let res = chi_memory_channel(&ch, budget).unwrap();
    assert!(res.entangled_inputs);
    assert!(res.chi > chi_coherent_baseline(&ch, budget).unwrap() + 1e-4);
}

#[test]
fn broken_symmetry_alone_does_not_force_entanglement() {
    // every block can afford the squeezing that purifies its output noise
    let budget = PhotonBudget::new(5.0, 8).unwrap();
    let ch = ModelConfig::new(Family::BrokenSymmetrySeparable, 8).with("s", 0.5).build().unwrap();
    assert!(!phase_symmetry(&ch).unwrap().channel_symmetric);
    let res = chi_memory_channel(&ch, budget).unwrap();
    assert!(!res.entangled_inputs);
    for m in &res.per_mode_inputs {
        let r = 0.25 * (m.input[(0, 0)] / m.input[(1, 1)]).ln();
        assert!((r - 0.25).abs() < 1e-6, "squeezing {r}");
    }
}
