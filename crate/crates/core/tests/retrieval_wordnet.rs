mod common;

use rasp_core::retrieval::{retrieve, RetrievalConfig, STOP_WORDS};

const MARY_TEXT: &str = "Mary went for birdwatching. She saw a harrier, a golden eagle, and a hobby.";
const JOHANNA: &str = "Johanna went birdwatching. She saw a harrier, a kite, and a hobby.";

fn keys(text: &str) -> Vec<String> {
    retrieve(text, common::wordnet(), &RetrievalConfig::default()).iter().map(|c| c.key.to_string()).collect()
}

#[test]
fn birdwatching_sentence_retrieves_the_listed_senses() {
    let keys = keys(MARY_TEXT);
    for k in ["golden_eagle.n.01", "birdwatch.v.01", "harrier.n.01", "harrier.n.02", "harrier.n.03", "hobby.n.01", "hobby.n.02", "hobby.n.03", "go.v.01", "see.v.01"] {
        assert!(keys.contains(&k.to_string()), "{k} missing from {keys:?}");
    }
    for k in &keys {
        let lemma = k.split('.').next().unwrap();
        assert!(lemma != "golden" && lemma != "eagle", "{k}");
        assert!(!STOP_WORDS.contains(&lemma), "{k}");
    }
}

#[test]
fn kite_sentence_covers_every_sense_in_the_prompt_example() {
    let keys = keys(JOHANNA);
    let expected = ["birdwatch.v.01", "saw.n.01", "saw.n.02", "saw.n.03", "saw.v.01", "kite.n.04", "kite.v.04", "hobby.n.03"];
    for k in expected {
        assert!(keys.contains(&k.to_string()), "{k} missing from {keys:?}");
    }
}

#[test]
fn candidates_are_sound_and_deterministic() {
    let store = common::wordnet();
    let a = retrieve(MARY_TEXT, store, &RetrievalConfig::default());
    assert_eq!(a, retrieve(MARY_TEXT, store, &RetrievalConfig::default()));
    for c in &a {
        assert_eq!(store.resolve(&c.key).map(|s| s.gloss.as_str()), Some(c.gloss.as_str()));
        assert!(a.iter().all(|o| !o.span.strictly_contains(&c.span)));
    }
}
