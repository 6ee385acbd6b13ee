//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; the process exits non-zero
//! when any criterion fails.
//!
//! Needs the WordNet 3.0 database (`scripts/fetch-wordnet.sh`, or point
//! `RASP_WORDNET` at an existing copy).

use std::collections::HashMap;
use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rasp_cli::{cmd_score, Settings, MANIFEST, PREDICTIONS, REPORT};
use rasp_core::concept::{ConceptKey, PosClass};
use rasp_core::corpus::{Corpus, Document, Split};
use rasp_core::metrics::{
    aggregate, brute_force_smatch, score_document, smatch, ChallengeItemScore, DocumentScore, MatchMode, MatchScore, TargetScore,
};
use rasp_core::prompting::{build_prompt, export_training, PromptMode};
use rasp_core::retrieval::{retrieve, RetrievalConfig, STOP_WORDS};
use rasp_core::sbn::{parse, serialize, validate};
use rasp_core::synth::{perturb, random_document, random_graph, SynthConfig};
use rasp_core::{Exact, WordnetStore};
use rasp_llm::{EndpointConfig, Prediction};
use serde_json::Value;

const MARY_TEXT: &str = "Mary went for birdwatching. She saw a harrier, a golden eagle, and a hobby.";
const MARY_GOLD: &str = "female.n.02 Name \"Mary\" time.n.08 TPR now birdwatch.v.01 Agent -2 Time -1 ELABORATION <1 female.n.02 ANA -3 see.v.01 Experiencer -1 Time +1 Stimulus +3 time.n.08 TPR now harrier.n.03 golden_eagle.n.01 entity.n.01 Sub -2 Sub -1 Sub +1 hobby.n.03";
const JOHANNA_TEXT: &str = "Johanna went birdwatching. She saw a harrier, a kite, and a hobby.";
/// The dialogue answer as printed, three lines.
const JOHANNA_GOLD: &str = "female.n.02 Name \"Johanna\" time.n.08 TPR now birdwatch.v.01 Agent -2 Time -1 ELABORATION <1\nfemale.n.02 ANA -3 see.v.01 Experiencer -1 Time +1 Stimulus +3 time.n.08 TPR now\nharrier.n.03 kite.n.04 entity.n.01 Sub -2 Sub -1 Sub +1 hobby.n.03";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if let false = $cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn wordnet_dir() -> PathBuf {
    std::env::var_os("RASP_WORDNET")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/wordnet-3.0"))
}

fn wordnet() -> &'static WordnetStore {
    static STORE: OnceLock<WordnetStore> = OnceLock::new();
    STORE.get_or_init(|| {
        let dir = wordnet_dir();
        WordnetStore::load(&dir).unwrap_or_else(|e| panic!("WordNet at {}: {e} (run scripts/fetch-wordnet.sh)", dir.display()))
    })
}

fn key(s: &str) -> ConceptKey {
    s.parse().unwrap()
}

fn wu_palmer_fidelity() -> Outcome {
    let store = wordnet();
    let pairs = [
        ("song.n.05", "song.n.03", 0.22),
        ("plant.v.05", "plant.v.02", 0.22),
        ("antenna.n.03", "antenna.n.01", 0.24),
        ("extract.n.02", "extract.n.01", 0.25),
        ("course.n.07", "course.n.03", 0.27),
        ("fugue.n.03", "fugue.n.02", 0.28),
        ("hobby.n.03", "hobby.n.02", 0.38),
        ("muscular.a.02", "muscular.a.01", 0.50),
        ("adder.n.03", "adder.n.01", 0.50),
        ("wren.n.02", "wren.n.01", 0.55),
    ];
    let start = Instant::now();
    let got: Vec<f64> = pairs.iter().map(|(a, b, _)| store.wup::<f64>(&key(a), &key(b))).collect();
    let elapsed = start.elapsed();
    let mut worst = 0.0f64;
    for ((a, b, want), v) in pairs.iter().zip(&got) {
        check!((v - want).abs() <= 0.03, "wup({a}, {b}) = {v:.4}, expected {want} +/- 0.03");
        worst = worst.max((v - want).abs());
    }
    check!(elapsed < Duration::from_secs(1), "10 similarities took {elapsed:?}");
    Ok(format!("10 pairs, max deviation {worst:.4}, {elapsed:?}"))
}

fn smatch_oracle_equivalence() -> Outcome {
    let store = wordnet();
    let cfg = SynthConfig::small(6);
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let start = Instant::now();
    let mut compared = 0;
    for i in 0..1000 {
        let gold = random_graph(&mut rng, &cfg);
        let pred = if i % 2 == 0 { perturb(&mut rng, &gold, &cfg) } else { random_graph(&mut rng, &cfg) };
        check!(pred.node_count() <= 6 && gold.node_count() <= 6, "generator exceeded 6 nodes");
        for mode in [MatchMode::Hard, MatchMode::Soft] {
            let (hc, _) = smatch::<Exact, _>(&pred, &gold, mode, 5, store);
            let bf = brute_force_smatch::<Exact, _>(&pred, &gold, mode, store).map_err(|e| e.to_string())?;
            check!(hc.f1 == bf.f1, "pair {i} {mode:?}: hill-climbing {} vs optimum {}\n  pred {}\n  gold {}", hc.f1, bf.f1, serialize(&pred), serialize(&gold));
            compared += 1;
        }
    }
    let elapsed = start.elapsed();
    check!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{compared} comparisons equal, {elapsed:?}"))
}

fn soft_dominance() -> Outcome {
    let store = wordnet();
    let cfg = SynthConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut violations = Vec::new();
    let mut strict = 0;
    for i in 0..1000 {
        let gold = random_graph(&mut rng, &cfg);
        let pred = if i % 2 == 0 { perturb(&mut rng, &gold, &cfg) } else { random_graph(&mut rng, &cfg) };
        let d = score_document::<Exact, _>("p", &serialize(&pred), &gold, &[], 5, store);
        if d.soft.f1 < d.hard.f1 {
            violations.push(format!("{i}: soft {} < hard {}", d.soft.f1, d.hard.f1));
        } else if d.soft.f1 > d.hard.f1 {
            strict += 1;
        }
    }
    check!(violations.is_empty(), "{} violations: {}", violations.len(), violations.join("; "));
    Ok(format!("0 violations on 1000 pairs ({strict} strictly higher)"))
}

fn fixed_point(text: &str) -> Result<(), String> {
    let g = parse(text).map_err(|e| format!("{e}: {text}"))?;
    let once = serialize(&g);
    let g2 = parse(&once).map_err(|e| format!("reparse {e}: {once}"))?;
    check!(g2 == g, "graph changed after round trip: {text}");
    check!(serialize(&g2) == once, "serialization not stable: {once}");
    Ok(())
}

fn sbn_round_trip() -> Outcome {
    fixed_point(MARY_GOLD)?;
    fixed_point(JOHANNA_GOLD)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = SynthConfig::default();
    for _ in 0..500 {
        fixed_point(&random_document(&mut rng, &cfg))?;
    }
    let mut rejected = 0;
    for i in 0..10_000 {
        let len = rng.random_range(0..160);
        let bytes: Vec<u8> = if i % 2 == 0 {
            (0..len).map(|_| rng.random()).collect()
        } else {
            // printable noise is likelier to reach deep parser states
            (0..len).map(|_| b" \n\t\"+-<>0123456789.anvrNSTAGEOPmcl"[rng.random_range(0..34)]).collect()
        };
        let text = String::from_utf8_lossy(&bytes).into_owned();
        match catch_unwind(AssertUnwindSafe(|| validate(&text))) {
            Ok(r) => rejected += r.is_err() as usize,
            Err(_) => return Err(format!("validator panicked on {bytes:?}")),
        }
    }
    Ok(format!("2 gold strings and 500 fuzz documents stable; 10000 byte strings without panic ({rejected} rejected)"))
}

fn retrieval_fixture() -> Outcome {
    let cands = retrieve(MARY_TEXT, wordnet(), &RetrievalConfig::default());
    let keys: Vec<String> = cands.iter().map(|c| c.key.to_string()).collect();
    let required = [
        "golden_eagle.n.01",
        "birdwatch.v.01",
        "harrier.n.01",
        "harrier.n.02",
        "harrier.n.03",
        "hobby.n.01",
        "hobby.n.02",
        "hobby.n.03",
    ];
    for k in required {
        check!(keys.contains(&k.to_string()), "{k} missing from {keys:?}");
    }
    let go = cands.iter().filter(|c| c.key.lemma == "go" && c.key.pos.as_char() == 'v').count();
    let see = cands.iter().filter(|c| c.key.lemma == "see" && c.key.pos.as_char() == 'v').count();
    check!(go > 0 && see > 0, "go senses {go}, see senses {see}");
    for c in &cands {
        check!(c.key.lemma != "golden" && c.key.lemma != "eagle", "standalone {}", c.key);
        let surface = c.span.tokens.join(" ");
        check!(!STOP_WORDS.contains(&surface.as_str()), "stop word `{surface}` produced {}", c.key);
        check!(!["for", "she", "a", "and"].contains(&surface.as_str()), "`{surface}` produced {}", c.key);
    }
    Ok(format!("{} candidates, {go} go senses, {see} see senses", cands.len()))
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn prompt_golden_files() -> Outcome {
    let rasp_golden = golden("johanna_rasp.txt");
    let normal_golden = golden("johanna_normal.txt");
    let model_golden = golden("johanna_model.txt");
    // The dialogue lists a subset of what retrieval finds; keep that subset
    // in retrieval order and let the store supply every gloss.
    let listed: Vec<&str> = rasp_golden.lines().filter_map(|l| l.strip_prefix("- ")?.split(':').next()).collect();
    let retrieved = retrieve(JOHANNA_TEXT, wordnet(), &RetrievalConfig::default());
    let cands: Vec<_> = retrieved.into_iter().filter(|c| listed.contains(&c.key.to_string().as_str())).collect();
    check!(cands.len() == listed.len(), "retrieved {} of the {} listed concepts", cands.len(), listed.len());

    let rasp = build_prompt("johanna", JOHANNA_TEXT, PromptMode::Rasp, &cands);
    let normal = build_prompt("johanna", JOHANNA_TEXT, PromptMode::Normal, &cands);
    check!(rasp.user() == Some(rasp_golden.as_str()), "RASP prompt differs:\n{}\n---\n{rasp_golden}", rasp.user().unwrap_or_default());
    check!(normal.user() == Some(normal_golden.as_str()), "normal prompt differs: {:?}", normal.user());

    let doc = Document { id: "johanna".into(), split: Split::Train, raw_text: JOHANNA_TEXT.into(), gold_sbn: Some(JOHANNA_GOLD.into()) };
    for (mode, user) in [(PromptMode::Rasp, &rasp_golden), (PromptMode::Normal, &normal_golden)] {
        let records = export_training(std::slice::from_ref(&doc), mode, |_| cands.clone()).map_err(|e| e.to_string())?;
        let r = &records[0];
        check!(r.user() == Some(user.as_str()), "{mode} training prompt differs");
        check!(r.model() == Some(model_golden.as_str()), "{mode} model turn differs: {:?}", r.model());
    }
    Ok(format!("RASP ({} bytes), normal and model turns byte-identical", rasp_golden.len()))
}

fn settings(out: &Path) -> Settings {
    Settings {
        wordnet: Some(wordnet_dir()),
        corpus: None,
        split: "standard".into(),
        mode: PromptMode::Normal,
        restarts: 5,
        out: out.to_path_buf(),
        max_candidates: None,
        endpoint: EndpointConfig::default(),
    }
}

fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
    for item in items {
        serde_json::to_writer(&mut f, item).unwrap();
        writeln!(f).unwrap();
    }
    f.flush().unwrap();
}

fn ifr_arithmetic() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1195);
    let cfg = SynthConfig::small(5);
    let garbage = ["", "female.n.02 Agent +7", "I cannot parse this.", "see.v.01 Time", "hobby.n.03 ELABORATION <4"];
    let mut docs = Vec::new();
    let mut predictions = Vec::new();
    for i in 0..1195 {
        let id = format!("s{i:04}");
        let gold = serialize(&random_graph(&mut rng, &cfg));
        let output = if i % 20 == 7 && predictions.iter().filter(|p: &&Prediction| validate(&p.output).is_err()).count() < 59 {
            garbage[(i / 20) % garbage.len()].to_string()
        } else {
            gold.clone()
        };
        predictions.push(Prediction { id: id.clone(), output, token_logprobs: None, latency: 0.0, attempt_count: 1 });
        docs.push(Document { id, split: Split::Standard, raw_text: "synthetic".into(), gold_sbn: Some(gold) });
    }
    let bad = predictions.iter().filter(|p| validate(&p.output).is_err()).count();
    check!(bad == 59, "fixture has {bad} ill-formed outputs");
    let corpus = Corpus::new(docs, Vec::new()).map_err(|e| e.to_string())?;
    let mut manifest = std::fs::File::create(dir.path().join(MANIFEST)).unwrap();
    corpus.write_manifest(&mut manifest).unwrap();
    write_jsonl(&dir.path().join(PREDICTIONS), &predictions);

    let report = cmd_score(&settings(dir.path())).map_err(|e| e.to_string())?;
    let s = &report.summary;
    check!(s.ifr.count == 59 && s.ifr.total == 1195, "IFR counts {:?}", s.ifr);
    check!(format!("{:.2}", s.ifr_rate) == "4.94", "IFR rate {}", s.ifr_rate);
    check!(report.table().contains("4.94 (59)"), "table lacks `4.94 (59)`:\n{}", report.table());
    Ok(format!("IFR {:.2}% ({} of {})", s.ifr_rate, s.ifr.count, s.ifr.total))
}

enum Reply {
    Gold,
    Output(&'static str),
}

struct Fixture {
    text: String,
    gold: String,
    target: &'static str,
    reply: Reply,
    /// Hand-computed Wu-Palmer score of the target against the reply.
    wup: f64,
}

/// 20 challenge documents: gold replies for 15, a wrong sense for 3
/// (the Wu-Palmer pairs hobby.n.03/n.02 = 8/21, muscular.a.02/a.01 = 1/2
/// and wren.n.02/n.01 = 6/11), garbage for 2.
fn e2e_fixtures() -> Vec<Fixture> {
    let names = [
        "Mary", "Anna", "Johanna", "Lisa", "Emma", "Sara", "Julia", "Nora", "Eva", "Lena", "Clara", "Ida", "Rosa", "Vera", "Alma", "Greta",
        "Hanna", "Olga", "Tina", "Zoe",
    ];
    let saw = |name: &str, word: &str, concept: &str| {
        (
            format!("{name} saw a {word}."),
            format!("female.n.02 Name \"{name}\" see.v.01 Experiencer -1 Time +1 Stimulus +2 time.n.08 TPR now {concept}"),
        )
    };
    let went = |name: &str| {
        (
            format!("{name} went birdwatching."),
            format!("female.n.02 Name \"{name}\" time.n.08 TPR now birdwatch.v.01 Agent -2 Time -1"),
        )
    };
    let strong = |name: &str| {
        (format!("{name} is muscular."), format!("female.n.02 Name \"{name}\" time.n.08 EQU now muscular.a.02 AttributeOf -2 Time -1"))
    };
    let plan: [(&str, &str, Reply, f64); 20] = [
        ("harrier", "harrier.n.03", Reply::Gold, 1.0),
        ("kite", "kite.n.04", Reply::Gold, 1.0),
        ("golden eagle", "golden_eagle.n.01", Reply::Gold, 1.0),
        ("hobby", "hobby.n.03", Reply::Gold, 1.0),
        ("wren", "wren.n.02", Reply::Gold, 1.0),
        ("adder", "adder.n.03", Reply::Gold, 1.0),
        ("hawk", "hawk.n.01", Reply::Gold, 1.0),
        ("dog", "dog.n.01", Reply::Gold, 1.0),
        ("fugue", "fugue.n.03", Reply::Gold, 1.0),
        ("antenna", "antenna.n.03", Reply::Gold, 1.0),
        ("", "birdwatch.v.01", Reply::Gold, 1.0),
        ("", "birdwatch.v.01", Reply::Gold, 1.0),
        ("", "birdwatch.v.01", Reply::Gold, 1.0),
        ("", "muscular.a.02", Reply::Gold, 1.0),
        ("", "muscular.a.02", Reply::Gold, 1.0),
        ("hobby", "hobby.n.03", Reply::Output("hobby.n.02"), 8.0 / 21.0),
        ("", "muscular.a.02", Reply::Output("muscular.a.01"), 0.5),
        ("wren", "wren.n.02", Reply::Output("wren.n.01"), 6.0 / 11.0),
        ("kite", "kite.n.04", Reply::Output("I am sorry, I cannot parse this sentence."), 0.0),
        ("", "birdwatch.v.01", Reply::Output("female.n.02 Agent +5 birdwatch.v.01"), 0.0),
    ];
    plan.into_iter()
        .zip(names)
        .map(|((word, target, reply, wup), name)| {
            let (text, gold) = match target {
                "birdwatch.v.01" => went(name),
                "muscular.a.02" => strong(name),
                _ => saw(name, word, target),
            };
            Fixture { text, gold, target, reply, wup }
        })
        .collect()
}

fn reply_for(f: &Fixture) -> String {
    match f.reply {
        Reply::Gold => f.gold.clone(),
        // wrong sense: swap the target's sense inside the gold answer
        Reply::Output(o) if o.contains('.') && !o.contains(' ') => f.gold.replace(f.target, o),
        Reply::Output(o) => o.to_string(),
    }
}

/// Serves `/v1/chat/completions` on a background thread; answers are looked
/// up by the text after the `Text to parse: ` prefix.
fn spawn_mock(answers: HashMap<String, String>) -> String {
    use axum::routing::post;
    use axum::{Json, Router};
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let runtime = tokio::runtime::Runtime::new().unwrap();
        runtime.block_on(async move {
            let answers = std::sync::Arc::new(answers);
            let app = Router::new().route(
                "/v1/chat/completions",
                post(move |Json(body): Json<Value>| {
                    let answers = answers.clone();
                    async move {
                        let user = body["messages"][0]["content"].as_str().unwrap_or_default();
                        let text = user.rsplit("Text to parse: ").next().unwrap_or_default();
                        match answers.get(text) {
                            Some(a) => (axum::http::StatusCode::OK, Json(serde_json::json!({ "choices": [{ "message": { "role": "assistant", "content": a } }] }))),
                            None => (axum::http::StatusCode::BAD_REQUEST, Json(serde_json::json!({ "error": "unknown text" }))),
                        }
                    }
                }),
            );
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(format!("http://{}/v1", listener.local_addr().unwrap())).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    rx.recv().expect("mock endpoint started")
}

fn rasp(args: &[&str], root: &Path) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rasp"))
        .args(args)
        .arg("--out")
        .arg(root.join("out"))
        .arg("--split")
        .arg("challenge")
        .env_remove("RASP_API_KEY")
        .output()
        .map_err(|e| e.to_string())?;
    check!(out.status.success(), "rasp {args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn end_to_end_mock() -> Outcome {
    let start = Instant::now();
    let fixtures = e2e_fixtures();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("corpus");
    let mut targets = String::new();
    for (i, f) in fixtures.iter().enumerate() {
        let d = corpus.join("challenge").join(format!("d{i:02}"));
        std::fs::create_dir_all(&d).unwrap();
        std::fs::write(d.join("en.raw"), &f.text).unwrap();
        std::fs::write(d.join("en.drs.sbn"), &f.gold).unwrap();
        let class = PosClass::of(key(f.target).pos);
        targets.push_str(&format!("d{i:02}\t{}\t{class}\n", f.target));
    }
    std::fs::write(corpus.join("challenge_targets.tsv"), targets).unwrap();
    let url = spawn_mock(fixtures.iter().map(|f| (f.text.clone(), reply_for(f))).collect());
    let wn = wordnet_dir();
    let wn = wn.to_str().unwrap();

    rasp(&["ingest", "--corpus", corpus.to_str().unwrap()], dir.path())?;
    rasp(&["retrieve", "--wordnet", wn], dir.path())?;
    rasp(&["prompt", "--mode", "rasp"], dir.path())?;
    rasp(&["infer", "--endpoint", &url, "--model", "mock", "--max-in-flight", "4"], dir.path())?;
    let table = rasp(&["score", "--wordnet", wn], dir.path())?;

    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out").join(REPORT)).unwrap()).unwrap();
    let s = &report["summary"];
    let f = |v: &Value| v.as_f64().unwrap_or(f64::NAN);
    let (hard, soft, node) = (f(&s["hard"]["f1"]), f(&s["soft"]["f1"]), f(&s["node"]["f1"]));
    check!(s["ifr"]["count"] == 2 && s["documents"] == 20, "ifr {} over {} documents", s["ifr"], s["documents"]);
    check!((f(&s["ifr_rate"]) - 10.0).abs() < 1e-9, "IFR rate {}", s["ifr_rate"]);
    check!(table.contains("10.00 (2)"), "table lacks `10.00 (2)`:\n{table}");
    check!(node < 1.0, "node F {node}");
    check!(soft > hard, "soft {soft} <= hard {hard}");

    let by_id: HashMap<&str, &Value> = report["documents"].as_array().unwrap().iter().map(|d| (d["id"].as_str().unwrap(), d)).collect();
    let mut class_values: HashMap<&str, Vec<f64>> = HashMap::new();
    for (i, fx) in fixtures.iter().enumerate() {
        let id = format!("d{i:02}");
        let got = f(&by_id[id.as_str()]["challenge"]["targets"][0]["wup"]);
        check!((got - fx.wup).abs() < 1e-9, "{id} {}: wup {got}, hand-computed {}", fx.target, fx.wup);
        class_values.entry(PosClass::of(key(fx.target).pos).as_str()).or_default().push(fx.wup);
    }
    let mean = |v: &[f64]| 100.0 * v.iter().sum::<f64>() / v.len() as f64;
    let all: Vec<f64> = fixtures.iter().map(|fx| fx.wup).collect();
    let c = &s["challenge"];
    for (field, want) in [
        ("noun", mean(&class_values["noun"])),
        ("verb", mean(&class_values["verb"])),
        ("modifier", mean(&class_values["modifier"])),
        ("overall", mean(&all)),
    ] {
        check!((f(&c[field]) - want).abs() < 1e-9, "challenge {field} {} vs hand-computed {want}", c[field]);
    }
    let elapsed = start.elapsed();
    check!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!(
        "IFR 10.00, hard {:.4}, soft {:.4}, node {:.4}, challenge overall {:.2}, {elapsed:?}",
        hard,
        soft,
        node,
        f(&c["overall"])
    ))
}

fn challenge_aggregation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(603);
    let mut remaining = [(PosClass::Noun, 410usize, "dog.n.01"), (PosClass::Verb, 128, "see.v.01"), (PosClass::Modifier, 65, "muscular.a.01")];
    let mut docs = Vec::new();
    let mut all: Vec<Exact> = Vec::new();
    let mut per_class: HashMap<PosClass, Vec<Exact>> = HashMap::new();
    while remaining.iter().any(|r| r.1 > 0) {
        let mut targets = Vec::new();
        for _ in 0..rng.random_range(1..=4) {
            let open: Vec<usize> = (0..3).filter(|&i| remaining[i].1 > 0).collect();
            let Some(&slot) = open.get(rng.random_range(0..open.len().max(1))) else { break };
            remaining[slot].1 -= 1;
            let (class, _, concept) = remaining[slot];
            let wup = Exact::new(rng.random_range(0..=60), 60);
            all.push(wup);
            per_class.entry(class).or_default().push(wup);
            targets.push(TargetScore { gold: key(concept), pos_class: class, matched: None, wup });
        }
        let id = format!("c{}", docs.len());
        let one = MatchScore::<Exact>::from_counts(1, 1, 1);
        docs.push(DocumentScore {
            id: id.clone(),
            well_formed: true,
            hard: one,
            soft: one,
            node: one,
            challenge: Some(ChallengeItemScore { id, targets }),
        });
    }
    let n_docs = docs.len();
    let report = aggregate(docs);
    let c = report.summary.challenge.ok_or("no challenge summary")?;
    check!((c.noun_targets, c.verb_targets, c.modifier_targets) == (410, 128, 65), "partition {}/{}/{}", c.noun_targets, c.verb_targets, c.modifier_targets);
    let hundred = Exact::from_integer(100);
    let mean = |v: &[Exact]| v.iter().copied().sum::<Exact>() / Exact::from_integer(v.len() as i128) * hundred;
    check!(all.len() == 603, "{} targets", all.len());
    check!(c.overall == Some(mean(&all)), "overall {:?} vs {}", c.overall, mean(&all));
    check!(c.noun == Some(mean(&per_class[&PosClass::Noun])), "noun {:?}", c.noun);
    check!(c.verb == Some(mean(&per_class[&PosClass::Verb])), "verb {:?}", c.verb);
    check!(c.modifier == Some(mean(&per_class[&PosClass::Modifier])), "modifier {:?}", c.modifier);
    let overall = c.overall.unwrap();
    Ok(format!("603 targets over {n_docs} documents, overall {overall} exactly"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Wu-Palmer fidelity", wu_palmer_fidelity),
        ("SMATCH oracle equivalence", smatch_oracle_equivalence),
        ("soft dominance", soft_dominance),
        ("SBN round trip", sbn_round_trip),
        ("retrieval fixture", retrieval_fixture),
        ("prompt golden files", prompt_golden_files),
        ("IFR arithmetic", ifr_arithmetic),
        ("end to end with mock LLM", end_to_end_mock),
        ("challenge aggregation", challenge_aggregation),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|n| n != i + 1) {
            continue;
        }
        let outcome = catch_unwind(run).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
