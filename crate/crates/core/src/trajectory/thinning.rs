use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::models::Detectability;

use super::PhotonRecord;

/// Apply detector efficiency `eta` to an emission record: each cavity-output
/// event is independently kept as detected with probability `eta`; free-space
/// events are never detected. The emission list itself is preserved, only the
/// `detected` flags change.
pub fn thin_records(records: &[PhotonRecord], eta: f64, seed: u64) -> Vec<PhotonRecord> {
    assert!((0.0..=1.0).contains(&eta), "eta must lie in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    records
        .iter()
        .map(|r| {
            let detected = match r.detectability {
                Detectability::CavityOutput => rng.gen::<f64>() < eta,
                Detectability::FreeSpace => false,
            };
            PhotonRecord { detected, ..*r }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cavity_record(time: f64) -> PhotonRecord {
        PhotonRecord {
            time,
            channel: 0,
            detectability: Detectability::CavityOutput,
            detected: true,
        }
    }

    fn free_space_record(time: f64) -> PhotonRecord {
        PhotonRecord {
            time,
            channel: 1,
            detectability: Detectability::FreeSpace,
            detected: false,
        }
    }

    #[test]
    fn eta_one_keeps_all_cavity_records() {
        let records: Vec<_> = (0..500).map(|i| cavity_record(i as f64)).collect();
        let thinned = thin_records(&records, 1.0, 9);
        assert!(thinned.iter().all(|r| r.detected));
    }

    #[test]
    fn eta_zero_detects_nothing() {
        let records: Vec<_> = (0..500).map(|i| cavity_record(i as f64)).collect();
        let thinned = thin_records(&records, 0.0, 9);
        assert!(thinned.iter().all(|r| !r.detected));
    }

    #[test]
    fn free_space_never_detected() {
        let records: Vec<_> = (0..200).map(|i| free_space_record(i as f64)).collect();
        let thinned = thin_records(&records, 1.0, 9);
        assert!(thinned.iter().all(|r| !r.detected));
    }

    #[test]
    fn detected_fraction_matches_binomial() {
        // eta = 0.2 over 1e5 records: fraction within 0.200 +- 0.004 (~3 sigma)
        let n = 100_000;
        let records: Vec<_> = (0..n).map(|i| cavity_record(i as f64)).collect();
        let thinned = thin_records(&records, 0.2, 4242);
        let frac = thinned.iter().filter(|r| r.detected).count() as f64 / n as f64;
        assert!((frac - 0.2).abs() < 0.004, "fraction {frac}");
    }

    #[test]
    fn thinning_preserves_times_and_order() {
        let records: Vec<_> = (0..50).map(|i| cavity_record(0.3 * i as f64)).collect();
        let thinned = thin_records(&records, 0.5, 1);
        assert_eq!(thinned.len(), records.len());
        for (a, b) in records.iter().zip(thinned.iter()) {
            assert_eq!(a.time.to_bits(), b.time.to_bits());
            assert_eq!(a.channel, b.channel);
        }
    }

    #[test]
    fn thinning_commutes_with_concatenation_in_distribution() {
        // detected counts of thin(A || B) and thin(A) || thin(B) agree within
        // 3 sigma of the binomial spread
        let a: Vec<_> = (0..40_000).map(|i| cavity_record(i as f64)).collect();
        let b: Vec<_> = (0..40_000).map(|i| cavity_record(1e6 + i as f64)).collect();
        let eta = 0.35;
        let joined: Vec<_> = a.iter().chain(b.iter()).copied().collect();
        let c1 = thin_records(&joined, eta, 77).iter().filter(|r| r.detected).count();
        let c2 = thin_records(&a, eta, 78).iter().filter(|r| r.detected).count()
            + thin_records(&b, eta, 79).iter().filter(|r| r.detected).count();
        let n = joined.len() as f64;
        let sigma = (n * eta * (1.0 - eta)).sqrt();
        assert!((c1 as f64 - c2 as f64).abs() < 3.0 * sigma * 2f64.sqrt());
    }
}
