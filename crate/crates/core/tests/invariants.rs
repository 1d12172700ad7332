//! Property-based checks of the cross-module invariants.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use v2i_radar::channel::{simulate_echo, DopplerConvention, EchoConfig, Target};
use v2i_radar::consts::{RANGE_BIN_M, WAVELENGTH_M};
use v2i_radar::estimator::{
    cfar_detect, CfarConfig, ChannelEstimator, DelayDopplerMap, RadarProcessor,
};
use v2i_radar::link::{
    average_rate, select_mcs, BeamConfig, LinkParams, McsEntry, McsTable, Phy, RoadGeometry,
};
use v2i_radar::mac::{simulate_misalignment, Scenario};
use v2i_radar::planner::{RadarTiming, SectorGeometry, SweepPlan};
use v2i_radar::waveform::{default_preamble, FrameKind, GolayPair, GolayParams};

fn delay_permutation(k: u32, keys: &[u32]) -> Vec<usize> {
    let mut delays: Vec<(u32, usize)> = (0..k).map(|i| (keys[i as usize], 1usize << i)).collect();
    delays.sort();
    delays.into_iter().map(|(_, d)| d).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_pairs_are_complementary(
        k in 1u32..=9,
        keys in prop::collection::vec(any::<u32>(), 9),
        signs in prop::collection::vec(prop::bool::ANY, 9),
    ) {
        let params = GolayParams::new(
            delay_permutation(k, &keys),
            signs[..k as usize].iter().map(|&s| if s { 1 } else { -1 }).collect(),
        );
        let pair = GolayPair::generate(1 << k, &params).unwrap();
        prop_assert_eq!(pair.max_sidelobe(), 0);
        let acf = pair.complementary_autocorrelation();
        prop_assert_eq!(acf[pair.len() - 1], 2 * pair.len() as i64);
    }

    #[test]
    fn echo_is_linear_in_targets(
        r1 in 1.0f64..40.0, r2 in 1.0f64..40.0,
        v1 in -20.0f64..20.0, v2 in -20.0f64..20.0,
        seed in any::<u64>(),
    ) {
        let tx = default_preamble(FrameKind::Scphy);
        let cfg = |noise: f64| EchoConfig {
            pulses: 4,
            pri_s: 4.29e-6,
            range_bins: 512,
            noise_power: noise,
            seed,
            convention: DopplerConvention::Paper,
        };
        let t1 = Target::new(r1, v1, Complex64::new(0.6, 0.2));
        let t2 = Target::new(r2, v2, Complex64::new(-0.3, 0.5));
        let both = simulate_echo(&tx, &[t1, t2], &cfg(0.1)).unwrap();
        let a = simulate_echo(&tx, &[t1], &cfg(0.0)).unwrap();
        let b = simulate_echo(&tx, &[t2], &cfg(0.0)).unwrap();
        let noise = simulate_echo(&tx, &[], &cfg(0.1)).unwrap();
        for p in 0..4 {
            for n in 0..both.pulse_len() {
                let sum = a.pulses()[p][n] + b.pulses()[p][n] + noise.pulses()[p][n];
                prop_assert!((both.pulses()[p][n] - sum).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_on_grid_targets_are_exact(
        delay in 10usize..500,
        doppler in 0usize..16,
        convention in prop_oneof![Just(DopplerConvention::Paper), Just(DopplerConvention::TwoWay)],
    ) {
        const P: usize = 16;
        const PRI: f64 = 50e-6;
        let kind = FrameKind::Scphy;
        let bin_velocity = convention.velocity_mps(1.0 / (P as f64 * PRI));
        // Two-way maps bins above P/2 to negative velocities; P/2 is +Nyquist.
        let signed = if convention == DopplerConvention::TwoWay && doppler > P / 2 {
            doppler as f64 - P as f64
        } else {
            doppler as f64
        };
        let range = delay as f64 * RANGE_BIN_M;
        let velocity = signed * bin_velocity;
        let cfg = EchoConfig {
            pulses: P,
            pri_s: PRI,
            range_bins: 512,
            noise_power: 0.0,
            seed: 0,
            convention,
        };
        let train = simulate_echo(&default_preamble(kind), &[Target::new(range, velocity, Complex64::new(1.0, 0.0))], &cfg).unwrap();
        let processor = RadarProcessor::new(
            ChannelEstimator::for_preamble(kind, 512).unwrap(),
            P,
            convention,
            CfarConfig::default(),
        );
        let ddm = processor.delay_doppler_map(&train).unwrap();
        let (r, k, peak) = ddm.peak();
        prop_assert_eq!((r, k), (delay, doppler));
        prop_assert!((peak - (P as f64).sqrt()).abs() < 1e-9);
        prop_assert!((ddm.range_of_bin(r) - range).abs() <= RANGE_BIN_M / 2.0);
        let dv = WAVELENGTH_M / (2.0 * P as f64 * PRI);
        prop_assert!((ddm.velocity_of_bin(k) - velocity).abs() <= dv / 2.0);
    }

    #[test]
    fn cfar_detections_monotone_in_pfa(seed in any::<u64>(), lo in -6.0f64..-1.0, step in 0.1f64..2.0) {
        let normal = Normal::new(0.0, 0.5f64.sqrt()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mags = (0..64 * 32).map(|_| normal.sample(&mut rng).hypot(normal.sample(&mut rng))).collect();
        let ddm = DelayDopplerMap::new(mags, 64, 32, 1e-5, DopplerConvention::Paper).unwrap();
        let count = |pfa: f64| cfar_detect(&ddm, &CfarConfig { pfa, max_targets: usize::MAX, ..CfarConfig::default() }).unwrap().len();
        let pfa_lo = 10f64.powf(lo);
        let pfa_hi = 10f64.powf((lo + step).min(-0.01));
        prop_assert!(count(pfa_hi) >= count(pfa_lo));
    }

    #[test]
    fn select_mcs_monotone_for_any_valid_table(
        steps in prop::collection::vec((0.1f64..5.0, 1.0f64..500.0), 1..12),
        base in -10.0f64..10.0,
        a in -20.0f64..60.0,
        delta in 0.0f64..20.0,
    ) {
        let mut snr = base;
        let mut rate = 0.0;
        let entries: Vec<McsEntry> = steps.iter().enumerate().map(|(i, &(ds, dr))| {
            snr += ds;
            rate += dr * 1e6;
            McsEntry { index: i as u8 + 1, phy: Phy::Sc, rate_bps: rate, min_snr_db: snr, psdu_octets: 4096, gamma: 0.01 }
        }).collect();
        let table = McsTable::new(entries).unwrap();
        let r = |s: f64| select_mcs(s, &table).map_or(0.0, |m| m.rate_bps);
        prop_assert!(r(a + delta) >= r(a));
    }

    #[test]
    fn average_rate_converges(d in 5.0f64..200.0, az in 1.0f64..40.0, speed in 10.0f64..40.0) {
        let road = RoadGeometry::new(d, 120.0).unwrap();
        let beam = BeamConfig::for_road(az, d, 0.0).unwrap();
        let p = LinkParams::default();
        let t = McsTable::dmg_default();
        let a = average_rate(&road, speed, &beam, &p, &t, 2e-3).unwrap().mean_rate_bps;
        let b = average_rate(&road, speed, &beam, &p, &t, 1e-3).unwrap().mean_rate_bps;
        prop_assert!(((a - b) / b).abs() < 5e-3);
    }
}

fn scenario(dv: f64, overlap: f64, start: f64, phi: f64, speeds: &[f64]) -> Scenario {
    let timing = RadarTiming::for_resolution(FrameKind::Cphy, dv).unwrap();
    let geometry = SectorGeometry::new(100.0, 120.0, start, phi).unwrap();
    let plan = SweepPlan::new(timing, geometry, 30.0).unwrap();
    let beam = BeamConfig::for_road(3.0, 100.0, overlap).unwrap();
    let mut s = Scenario::reference(dv, overlap).unwrap();
    for (v, &speed) in s.vehicles.iter_mut().zip(speeds) {
        v.speed_mps = speed;
    }
    Scenario::new(plan, beam, s.vehicles, 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn misalignment_cdf_is_monotone(
        dv in 0.1f64..3.0,
        overlap in 0.0f64..0.9,
        start in 0.0f64..30.0,
        phi in 1.0f64..10.0,
        speeds in prop::collection::vec(15.0f64..30.0, 5),
        seed in any::<u64>(),
    ) {
        let s = scenario(dv, overlap, start, phi, &speeds);
        let cdf = simulate_misalignment(&s, 500, seed).unwrap();
        prop_assert!(cdf.is_monotone());
        prop_assert!(cdf.probability.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    // Sector centres move with the stride, so a small overlap increase can
    // shift a handover point onto a slightly worse spot; the CDFs are
    // ordered up to that grid effect.
    #[test]
    fn more_overlap_never_worse_beyond_grid_effect(
        dv in 0.2f64..3.0,
        overlap in 0.0f64..0.8,
        extra in 0.1f64..0.2,
        speeds in prop::collection::vec(20.0f64..30.0, 5),
    ) {
        let lo = simulate_misalignment(&scenario(dv, overlap, 0.0, 5.0, &speeds), 2000, 5).unwrap();
        let hi = simulate_misalignment(&scenario(dv, (overlap + extra).min(0.95), 0.0, 5.0, &speeds), 2000, 5).unwrap();
        for (a, b) in lo.probability.iter().zip(&hi.probability) {
            prop_assert!(*b <= *a + 0.01, "{b} > {a}");
        }
    }
}
