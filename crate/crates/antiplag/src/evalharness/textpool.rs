//! Seeded sentence pool for corpus generation.
//!
//! The original evaluation drew sentences from books, web pages, and
//! paper-mill essays; none of that material ships here, so the harness
//! synthesizes a structurally similar pool from a fixed vocabulary.
//! Sentences are 18–20 words, unique within a pool, and deterministic
//! for a given seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

const ADJECTIVES: &[&str] = &[
    "ancient", "bright", "broad", "calm", "careful", "clear", "cold", "dark", "deep", "distant",
    "dry", "eager", "early", "empty", "faint", "fine", "firm", "fresh", "gentle", "grand",
    "heavy", "hollow", "keen", "late", "loud", "narrow", "pale", "plain", "quick", "quiet",
    "rough", "round", "sharp", "silent", "simple", "slow", "small", "smooth", "steady", "steep",
    "still", "strange", "strong", "sudden", "tall", "thin", "warm", "weary", "wide", "young",
];

const NOUNS: &[&str] = &[
    "anchor", "autumn", "bridge", "candle", "canyon", "captain", "cellar", "chamber", "channel",
    "chimney", "coast", "compass", "corner", "cottage", "courtyard", "creek", "current",
    "desert", "engine", "evening", "farmer", "field", "forest", "fountain", "garden", "gateway",
    "glacier", "granite", "harbour", "harvest", "hillside", "island", "journal", "junction",
    "ladder", "lantern", "meadow", "merchant", "morning", "mountain", "orchard", "painter",
    "passage", "pasture", "pathway", "pebble", "pillar", "pioneer", "plateau", "quarry",
    "raven", "ridge", "river", "saddle", "sailor", "scholar", "shelter", "signal", "spring",
    "station", "summit", "tailor", "tavern", "teacher", "temple", "thicket", "timber",
    "tunnel", "valley", "village", "vineyard", "voyage", "wagon", "weaver", "window", "winter",
];

const VERBS: &[&str] = &[
    "carries", "climbs", "crosses", "describes", "discovers", "examines", "follows", "gathers",
    "guards", "holds", "inspects", "leads", "measures", "mentions", "observes", "passes",
    "reaches", "records", "repairs", "reports", "shelters", "signals", "sketches", "studies",
    "surveys", "traces", "visits", "watches",
];

const ADVERBS: &[&str] = &[
    "briskly", "calmly", "carefully", "gently", "often", "quickly", "quietly", "rarely",
    "slowly", "steadily", "suddenly", "twice",
];

const PREPOSITIONS: &[&str] = &[
    "above", "across", "along", "behind", "below", "beside", "beyond", "near",
];

/// A pool of unique generated sentences.
#[derive(Debug, Clone)]
pub struct TextPool {
    sentences: Vec<String>,
}

impl TextPool {
    pub fn generate(seed: u64, count: usize) -> TextPool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen: HashSet<String> = HashSet::with_capacity(count);
        let mut sentences = Vec::with_capacity(count);
        while sentences.len() < count {
            let s = sentence(&mut rng);
            if seen.insert(s.clone()) {
                sentences.push(s);
            }
        }
        TextPool { sentences }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }
}

struct Draw<'r> {
    rng: &'r mut ChaCha8Rng,
    used: HashSet<&'static str>,
}

impl<'r> Draw<'r> {
    fn new(rng: &'r mut ChaCha8Rng) -> Self {
        Draw {
            rng,
            used: HashSet::new(),
        }
    }

    /// Pick a word not yet used in this sentence.
    fn pick(&mut self, pool: &[&'static str]) -> &'static str {
        loop {
            let w = *pool.choose(self.rng).expect("non-empty pool");
            if self.used.insert(w) {
                return w;
            }
        }
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

fn sentence(rng: &mut ChaCha8Rng) -> String {
    let template = rng.random_range(0..5u8);
    let mut d = Draw::new(rng);
    let s = match template {
        0 => format!(
            "The {} {} {} the {} {} {} the {} {} and {} the {} {} {} the {} {}.",
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(PREPOSITIONS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(PREPOSITIONS),
            d.pick(NOUNS),
            d.pick(ADVERBS),
        ),
        1 => format!(
            "The {} {} {} the {} {} {} the {} {} while the {} {} {} the {} {} {}.",
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(PREPOSITIONS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(ADVERBS),
        ),
        2 => format!(
            "{} the {} {} the {} {} {} the {} {} and the {} {} {} the {} {} {}.",
            capitalize(d.pick(PREPOSITIONS)),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(ADVERBS),
        ),
        3 => format!(
            "The {} {} the {} {} {} the {} while the {} {} {} the {} {} {}.",
            d.pick(NOUNS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(PREPOSITIONS),
            d.pick(NOUNS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(ADVERBS),
        ),
        _ => format!(
            "The {} {} {} {} the {} {} {} the {} {} and {} the {} {} {} the {}.",
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(ADVERBS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(PREPOSITIONS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(VERBS),
            d.pick(ADJECTIVES),
            d.pick(NOUNS),
            d.pick(PREPOSITIONS),
            d.pick(NOUNS),
        ),
    };
    s
}
