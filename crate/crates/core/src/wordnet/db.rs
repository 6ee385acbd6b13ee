//! WNDB file parsing.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use super::{Synset, SynsetId, SynsetType, WordnetError, WordnetStore};
use crate::concept::Pos;

pub(super) fn load(dir: &Path) -> Result<WordnetStore, WordnetError> {
    let mut synsets = Vec::new();
    let mut positions = HashMap::new();
    // Raw hypernym pointers, resolved once every data file is read.
    let mut pointers: Vec<Vec<(Pos, u32, PathBuf, usize)>> = Vec::new();

    for pos in Pos::ALL {
        let path = dir.join(format!("data.{}", pos.file_suffix()));
        let text = read(&path)?;
        for (n, line) in text.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue;
            }
            let record = parse_data_line(line).map_err(|reason| malformed(&path, n + 1, reason))?;
            if record.id.pos.family() != pos {
                return Err(malformed(&path, n + 1, format!("synset type {} in data.{}", record.id.pos.as_char(), pos.file_suffix())));
            }
            if positions.insert((pos, record.id.offset), synsets.len()).is_some() {
                return Err(malformed(&path, n + 1, format!("duplicate offset {}", record.id.offset)));
            }
            pointers.push(record.hypernyms.into_iter().map(|(p, o)| (p, o, path.clone(), n + 1)).collect());
            synsets.push(Synset {
                id: record.id,
                lemmas: record.lemmas,
                gloss: record.gloss,
                hypernyms: Vec::new(),
                sense_labels: BTreeMap::new(),
            });
        }
    }

    let mut parents = Vec::with_capacity(synsets.len());
    for (i, targets) in pointers.into_iter().enumerate() {
        let mut own = Vec::new();
        for (pos, offset, path, line) in targets {
            let j = *positions
                .get(&(pos, offset))
                .ok_or_else(|| malformed(&path, line, format!("hypernym {offset:08} not found")))?;
            if j != i && !own.contains(&j) {
                own.push(j);
            }
        }
        synsets[i].hypernyms = own.iter().map(|&j| synsets[j].id).collect();
        parents.push(own);
    }

    let mut index: [HashMap<String, Vec<usize>>; 4] = Default::default();
    for pos in Pos::ALL {
        let path = dir.join(format!("index.{}", pos.file_suffix()));
        let text = read(&path)?;
        for (n, line) in text.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue;
            }
            let (lemma, offsets) = parse_index_line(line).map_err(|reason| malformed(&path, n + 1, reason))?;
            let mut senses = Vec::with_capacity(offsets.len());
            for (k, offset) in offsets.into_iter().enumerate() {
                let i = *positions
                    .get(&(pos, offset))
                    .ok_or_else(|| malformed(&path, n + 1, format!("synset {offset:08} not in data.{}", pos.file_suffix())))?;
                synsets[i].sense_labels.insert(lemma.clone(), (k + 1) as u16);
                senses.push(i);
            }
            index[pos.index()].insert(lemma, senses);
        }
    }

    let mut exceptions: [HashMap<String, Vec<String>>; 4] = Default::default();
    for pos in Pos::ALL {
        let path = dir.join(format!("{}.exc", pos.file_suffix()));
        let text = read(&path)?;
        for (n, line) in text.lines().enumerate() {
            let mut fields = line.split_whitespace();
            let Some(inflected) = fields.next() else { continue };
            let bases: Vec<String> = fields.map(str::to_string).collect();
            if bases.is_empty() {
                return Err(malformed(&path, n + 1, "exception without base form".into()));
            }
            exceptions[pos.index()].entry(inflected.to_string()).or_default().extend(bases);
        }
    }

    let (min_depth, max_depth) = depths(&parents);
    Ok(WordnetStore { synsets, positions, index, exceptions, parents, min_depth, max_depth })
}

fn read(path: &Path) -> Result<String, WordnetError> {
    if !path.is_file() {
        return Err(WordnetError::MissingFile(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|source| WordnetError::Io { path: path.to_path_buf(), source })
}

fn malformed(path: &Path, line: usize, reason: String) -> WordnetError {
    WordnetError::MalformedLine { file: path.to_path_buf(), line, reason }
}

struct DataRecord {
    id: SynsetId,
    lemmas: Vec<String>,
    gloss: String,
    hypernyms: Vec<(Pos, u32)>,
}

/// `synset_offset lex_filenum ss_type w_cnt word lex_id [...] p_cnt [ptr...] [frames] | gloss`
fn parse_data_line(line: &str) -> Result<DataRecord, String> {
    let (head, gloss) = line.split_once('|').ok_or("missing gloss separator")?;
    let mut fields = head.split_whitespace();
    let mut next = |what: &str| fields.next().ok_or_else(|| format!("truncated record: missing {what}"));

    let offset: u32 = next("offset")?.parse().map_err(|_| "bad synset offset")?;
    next("lex_filenum")?;
    let ss_type = next("ss_type")?;
    let ss_type = single_char(ss_type).and_then(SynsetType::from_char).ok_or_else(|| format!("bad ss_type `{ss_type}`"))?;
    let w_cnt = usize::from_str_radix(next("w_cnt")?, 16).map_err(|_| "bad w_cnt")?;
    if w_cnt == 0 {
        return Err("synset without words".into());
    }
    let mut lemmas: Vec<String> = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = normalize_word(next("word")?);
        next("lex_id")?;
        if !lemmas.contains(&word) {
            lemmas.push(word);
        }
    }
    let p_cnt: usize = next("p_cnt")?.parse().map_err(|_| "bad p_cnt")?;
    let mut hypernyms = Vec::new();
    for _ in 0..p_cnt {
        let symbol = next("pointer symbol")?;
        let target: u32 = next("pointer offset")?.parse().map_err(|_| "bad pointer offset")?;
        let pos = next("pointer pos")?;
        let pos = single_char(pos).and_then(Pos::from_char).ok_or_else(|| format!("bad pointer pos `{pos}`"))?;
        next("pointer source/target")?;
        if symbol == "@" || symbol == "@i" {
            hypernyms.push((pos, target));
        }
    }

    let gloss = definition(gloss);
    if gloss.is_empty() {
        return Err("empty gloss".into());
    }
    Ok(DataRecord { id: SynsetId { pos: ss_type, offset }, lemmas, gloss, hypernyms })
}

/// `lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt synset_offset...`
fn parse_index_line(line: &str) -> Result<(String, Vec<u32>), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 6 {
        return Err("truncated index entry".into());
    }
    let synset_cnt: usize = fields[2].parse().map_err(|_| "bad synset_cnt")?;
    let p_cnt: usize = fields[3].parse().map_err(|_| "bad p_cnt")?;
    let first = 4 + p_cnt + 2;
    let offsets = fields.get(first..first + synset_cnt).ok_or("truncated offset list")?;
    if synset_cnt == 0 {
        return Err("index entry without synsets".into());
    }
    let offsets = offsets
        .iter()
        .map(|o| o.parse::<u32>().map_err(|_| format!("bad synset offset `{o}`")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((fields[0].to_lowercase(), offsets))
}

fn single_char(s: &str) -> Option<char> {
    let mut chars = s.chars();
    let c = chars.next()?;
    chars.next().is_none().then_some(c)
}

/// Lowercases and strips adjective position markers such as `(a)` or `(ip)`.
fn normalize_word(word: &str) -> String {
    let word = match word.find('(') {
        Some(i) if word.ends_with(')') => &word[..i],
        _ => word,
    };
    word.to_lowercase()
}

/// The gloss without its quoted example sentences.
pub(super) fn definition(gloss: &str) -> String {
    let mut out = String::with_capacity(gloss.len());
    let mut quoted = false;
    for c in gloss.chars() {
        if c == '"' {
            quoted = !quoted;
        } else if !quoted {
            out.push(c);
        }
    }
    out.trim_matches(|c: char| c == ';' || c.is_whitespace()).to_string()
}

/// Minimum and maximum hypernym-path length to a root, per synset.
fn depths(parents: &[Vec<usize>]) -> (Vec<u32>, Vec<u32>) {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Unvisited,
        Active,
        Done,
    }

    fn visit(i: usize, parents: &[Vec<usize>], state: &mut [State], lo: &mut [u32], hi: &mut [u32]) {
        state[i] = State::Active;
        let mut min = None::<u32>;
        let mut max = None::<u32>;
        for &p in &parents[i] {
            if state[p] == State::Unvisited {
                visit(p, parents, state, lo, hi);
            }
            // An active parent closes a cycle; that edge is ignored.
            if state[p] == State::Done {
                min = Some(min.map_or(lo[p], |m| m.min(lo[p])));
                max = Some(max.map_or(hi[p], |m| m.max(hi[p])));
            }
        }
        lo[i] = min.map_or(0, |m| m + 1);
        hi[i] = max.map_or(0, |m| m + 1);
        state[i] = State::Done;
    }

    let n = parents.len();
    let mut state = vec![State::Unvisited; n];
    let mut lo = vec![0; n];
    let mut hi = vec![0; n];
    for i in 0..n {
        if state[i] == State::Unvisited {
            visit(i, parents, &mut state, &mut lo, &mut hi);
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_real_data_line() {
        let line = "01612476 05 n 01 hobby 0 002 @ 01611969 n 0000 #m 01612122 n 0000 | small Old World falcon formerly trained and flown at small birds  ";
        let rec = parse_data_line(line).unwrap();
        assert_eq!(rec.id, SynsetId { pos: SynsetType::Noun, offset: 1612476 });
        assert_eq!(rec.lemmas, vec!["hobby"]);
        assert_eq!(rec.hypernyms, vec![(Pos::Noun, 1611969)]);
        assert_eq!(rec.gloss, "small Old World falcon formerly trained and flown at small birds");
    }

    #[test]
    fn parses_index_line_with_pointers() {
        let (lemma, offsets) = parse_index_line("hobby n 3 5 @ ~ #m %p + 3 1 00432689 03523633 01612476  ").unwrap();
        assert_eq!(lemma, "hobby");
        assert_eq!(offsets, vec![432689, 3523633, 1612476]);
        assert!(parse_index_line("hobby n 3 5 @ ~ #m %p + 3 1 00432689").is_err());
    }

    #[test]
    fn definition_removes_examples() {
        assert_eq!(definition(" make a hole; \"dig a well\"; \"dig a hole\"  "), "make a hole");
        assert_eq!(definition(" a hound; used to hunt rabbits  "), "a hound; used to hunt rabbits");
    }

    #[test]
    fn depth_tables_follow_longest_and_shortest_paths() {
        // 0 <- 1 <- 2, and 3 has parents {0, 2}
        let parents = vec![vec![], vec![0], vec![1], vec![0, 2]];
        let (lo, hi) = depths(&parents);
        assert_eq!(lo, vec![0, 1, 2, 1]);
        assert_eq!(hi, vec![0, 1, 2, 3]);
    }
}
