use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chatlog::{Rating, Session};
use crate::error::{Error, Result};
use crate::ngram::{build_ngram_vocab, class_centroid_vector, cosine_distance, NgramOrder, DEFAULT_TOP_K};

pub const DEFAULT_SAMPLE_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatingDistances {
    pub sample_size: usize,
    /// Cosine distance from the Average centroid, for the four other classes
    /// in star order.
    pub distances: Vec<(String, f64)>,
}

impl RatingDistances {
    pub fn get(&self, rating: Rating) -> Option<f64> {
        self.distances.iter().find(|(n, _)| n == rating.name()).map(|d| d.1)
    }
}

/// Samples `fraction` of the labeled sessions, builds top-1000 unigram class
/// centroids on the sample, and measures each class against Average.
pub fn rating_distance_analysis(labeled: &[&Session], fraction: f64, seed: u64) -> Result<RatingDistances> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!("sample fraction {fraction} outside (0, 1]")));
    }
    let mut sample: Vec<&Session> = labeled.to_vec();
    sample.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    sample.truncate((labeled.len() as f64 * fraction).round() as usize);
    let vocab = build_ngram_vocab(sample.iter().copied(), DEFAULT_TOP_K, NgramOrder::Unigrams);
    let mut centroids = Vec::new();
    for r in Rating::ALL {
        let class: Vec<&Session> = sample.iter().copied().filter(|s| s.rating == Some(r)).collect();
        if class.is_empty() {
            return Err(Error::InvalidInput(format!(
                "no {} sessions in a {fraction} sample of {} labeled sessions; use a larger fraction",
                r.name(),
                labeled.len()
            )));
        }
        centroids.push((r, class_centroid_vector(&class, &vocab)?));
    }
    let avg = &centroids[Rating::Average as usize - 1].1;
    let distances = centroids
        .iter()
        .filter(|(r, _)| *r != Rating::Average)
        .map(|(r, c)| (r.name().to_string(), cosine_distance(avg, c)))
        .collect();
    Ok(RatingDistances {
        sample_size: sample.len(),
        distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chatlog::tests::session;
    use crate::chatlog::Speaker::*;

    fn rated(i: usize, stars: i64, text: &str) -> Session {
        let mut s = session(&format!("r{i}"), &[(Agent, 0.0, "hello there"), (Customer, 9.0, text)], None);
        s.rating = Rating::from_stars(stars);
        s
    }

    #[test]
    fn identical_language_gives_zero() {
        let all: Vec<Session> = (0..10).map(|i| rated(i, (i % 5) as i64 + 1, "my phone is broken")).collect();
        let refs: Vec<&Session> = all.iter().collect();
        let d = rating_distance_analysis(&refs, 1.0, 0).unwrap();
        assert_eq!(d.distances.len(), 4);
        assert!(d.distances.iter().all(|(_, v)| v.abs() < 1e-12));
    }

    #[test]
    fn shared_vocabulary_is_closer() {
        let text = |stars: i64| match stars {
            1 | 2 => "refund never arrived again",
            _ => "router works fine thanks",
        };
        let all: Vec<Session> = (0..20).map(|i| {
            let stars = (i % 5) as i64 + 1;
            rated(i, stars, text(stars))
        }).collect();
        let refs: Vec<&Session> = all.iter().collect();
        let d = rating_distance_analysis(&refs, 1.0, 0).unwrap();
        assert!(d.get(Rating::Satisfied).unwrap() < d.get(Rating::Dissatisfied).unwrap());
        assert!(d.get(Rating::VerySatisfied).unwrap() < d.get(Rating::VeryDissatisfied).unwrap());
    }

    #[test]
    fn empty_class_is_an_error() {
        let all: Vec<Session> = (0..10).map(|i| rated(i, 3 + (i % 3) as i64, "ok")).collect();
        let refs: Vec<&Session> = all.iter().collect();
        let err = rating_distance_analysis(&refs, 1.0, 0).unwrap_err().to_string();
        assert!(err.contains("larger fraction"), "{err}");
    }
}
