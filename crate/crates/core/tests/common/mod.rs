#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use rasp_core::WordnetStore;

/// WordNet 3.0 directory: `$RASP_WORDNET`, else `data/wordnet-3.0` at the
/// workspace root (see `scripts/fetch-wordnet.sh`).
pub fn wordnet_dir() -> PathBuf {
    std::env::var_os("RASP_WORDNET")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/wordnet-3.0"))
}

pub fn wordnet() -> &'static WordnetStore {
    static STORE: OnceLock<WordnetStore> = OnceLock::new();
    STORE.get_or_init(|| {
        let dir = wordnet_dir();
        WordnetStore::load(&dir).unwrap_or_else(|e| {
            panic!("WordNet 3.0 not available at {} ({e}); run scripts/fetch-wordnet.sh", dir.display())
        })
    })
}
