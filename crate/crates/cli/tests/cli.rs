use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn mucheck(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mucheck")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(dir: &Path, stem: &str) -> toml::Table {
    fs::read_to_string(dir.join(format!("{stem}.toml"))).unwrap().parse().unwrap()
}

const KRIPKE: &str = r#"{"functor":"powerset","states":["a","b"],"valuation":{"p":["b"]},"transitions":{"a":["b"],"b":["b"]}}"#;

fn kripke(dir: &Path, formula: &str) {
    fs::write(dir.join("k.model"), KRIPKE).unwrap();
    fs::write(dir.join("k.mu"), formula).unwrap();
}

#[test]
fn top_holds_everywhere() {
    let dir = TempDir::new().unwrap();
    kripke(dir.path(), "true");
    for engine in ["local", "lazy", "game"] {
        let out = mucheck(&["check", "k.model", "k.mu", "--engine", engine, "--state", "b"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{engine}: {}", stdout(&out));
    }
}

#[test]
fn exit_codes_follow_the_verdict() {
    let dir = TempDir::new().unwrap();
    kripke(dir.path(), "# reachability, then its failure at a\nmu X. p | <>X;\np");
    let out = mucheck(&["check", "k.model", "k.mu"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("holds at a: mu X. p | <>X"), "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("fails at a: p"), "{text}");
    let out = mucheck(&["check", "k.model", "k.mu", "--state", "#1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    kripke(dir.path(), "<g 2> p");
    let cases: [&[&str]; 5] = [
        &["check", "missing.model", "k.mu"],
        &["check", "k.model", "k.mu"],
        &["check", "k.model", "k.mu", "--state", "zz"],
        &["check", "k.model", "k.model"],
        &["gen", "hanoi", "99"],
    ];
    for args in cases {
        let out = mucheck(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn lazy_hanoi_reports_a_partial_exploration() {
    let dir = TempDir::new().unwrap();
    let gen = mucheck(&["gen", "hanoi", "3", "--lazy"], dir.path());
    assert!(gen.status.success());
    let m = manifest(dir.path(), "lazy-hanoi-none-3");
    let initial = m["initial"].as_array().unwrap()[0].as_str().unwrap();
    let out = mucheck(
        &["check", "lazy-hanoi-none-3.model", "lazy-hanoi-none-3.mu", "--engine", "lazy", "--state", initial],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let (explored, total) = parse_explored(&text);
    assert!(explored < total, "{text}");
    // repeated runs agree on verdict and exploration
    assert_eq!(stdout(&mucheck(&["check", "lazy-hanoi-none-3.model", "lazy-hanoi-none-3.mu", "--engine", "lazy", "--state", initial], dir.path())), text);
}

fn parse_explored(text: &str) -> (usize, usize) {
    let rest = text.split("[explored ").nth(1).expect("statistics printed");
    let mut words = rest.split_whitespace();
    let explored = words.next().unwrap().parse().unwrap();
    assert_eq!(words.next(), Some("of"));
    let total = words.next().unwrap().trim_end_matches(',').parse().unwrap();
    (explored, total)
}

#[test]
fn gen_writes_files_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out = mucheck(&["gen", "hanoi", "1", "--lazy", "--out", "bench"], dir.path());
    assert!(out.status.success());
    let d = dir.path().join("bench");
    for ext in ["model", "mu", "gm", "toml"] {
        assert!(d.join(format!("lazy-hanoi-none-1.{ext}")).exists(), "{ext}");
    }
    assert_eq!(manifest(&d, "lazy-hanoi-none-1")["worlds"].as_integer(), Some(5));
    assert!(stdout(&out).contains("worlds = 5"));

    mucheck(&["gen", "clique", "3"], dir.path());
    assert_eq!(manifest(dir.path(), "clique-none-3")["worlds"].as_integer(), Some(3));

    mucheck(&["gen", "ladder", "4", "--lift", "graded"], dir.path());
    let m = manifest(dir.path(), "ladder-graded-4");
    assert!(m["min_multiplicity"].as_integer().unwrap() >= 10);

    // game families have no parity game file
    mucheck(&["gen", "castle", "2", "1"], dir.path());
    assert!(dir.path().join("castle-none-2x1.model").exists());
    assert!(!dir.path().join("castle-none-2x1.gm").exists());
    assert_eq!(manifest(dir.path(), "castle-none-2x1")["formulas"].as_integer(), Some(4));
}

#[test]
fn generated_files_check_with_every_engine() {
    let dir = TempDir::new().unwrap();
    mucheck(&["gen", "modulo", "2", "2"], dir.path());
    let outs: Vec<String> = ["local", "lazy", "game"]
        .iter()
        .map(|e| {
            let out = mucheck(&["check", "modulo-none-2x2.model", "modulo-none-2x2.mu", "--engine", e], dir.path());
            assert_eq!(out.status.code(), Some(1));
            stdout(&out).lines().map(|l| l.split(" [").next().unwrap().to_string()).collect::<Vec<_>>().join("\n")
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[0], outs[2]);
    assert_eq!(outs[0].lines().count(), 6);
}

fn rows(path: &Path) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().clone();
    (header, r.records().map(Result::unwrap).collect())
}

const HEADER: &str = "family,lift,size,engine,verdict,mean,std,runs,timeout,explored,total,quotient,game_positions";

#[test]
fn bench_single_cell() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("m.toml"), "[[sweep]]\nfamily = \"ladder\"\nsizes = [3]\nengines = [\"game\"]\n").unwrap();
    let out = mucheck(&["bench", "m.toml", "--out", "r.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, data) = rows(&dir.path().join("r.csv"));
    assert_eq!(header.iter().collect::<Vec<_>>().join(","), HEADER);
    assert_eq!(data.len(), 1);
    let row = &data[0];
    assert_eq!(&row[0], "ladder");
    assert_eq!(&row[2], "3");
    assert_eq!(&row[4], "holds");
    // five repetitions by default
    assert_eq!(&row[7], "5");
    assert_eq!(&row[8], "false");
    assert!(row[5].parse::<f64>().unwrap() >= 0.0);
    assert!(row[11].is_empty() && !row[12].is_empty());
}

#[test]
fn bench_matrix_is_deterministic_apart_from_timings() {
    let dir = TempDir::new().unwrap();
    let matrix = r#"
[[sweep]]
family = "hanoi"
lazy = true
lifts = ["none", "probabilistic"]
sizes = [1, 2]

[[sweep]]
family = "modulo"
params = [[2, 2]]
engines = ["local", "game"]
"#;
    fs::write(dir.path().join("m.toml"), matrix).unwrap();
    let run = |jobs: &str, file: &str| {
        let out = mucheck(&["bench", "m.toml", "--reps", "1", "--jobs", jobs, "--out", file], dir.path());
        assert!(out.status.success());
        rows(&dir.path().join(file)).1
    };
    let a = run("1", "a.csv");
    let b = run("3", "b.csv");
    assert_eq!(a.len(), 2 * 2 * 3 + 2);
    let strip = |r: &csv::StringRecord| r.iter().enumerate().filter(|(i, _)| *i != 5 && *i != 6).map(|(_, v)| v.to_string()).collect::<Vec<_>>();
    assert_eq!(a.iter().map(strip).collect::<Vec<_>>(), b.iter().map(strip).collect::<Vec<_>>());
    for r in &a {
        if !r[11].is_empty() {
            let q: f64 = r[11].parse().unwrap();
            assert!((0.0..=1.0).contains(&q));
        }
    }
    // lazy engine explores part of the larger lazy Hanoi
    let lazy = a.iter().find(|r| &r[1] == "none" && &r[2] == "2" && &r[3] == "lazy").unwrap();
    assert!(lazy[11].parse::<f64>().unwrap() < 1.0);
}

#[test]
fn bench_marks_timeouts() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("m.toml"), "[[sweep]]\nfamily = \"jurdzinski\"\nsizes = [60]\nengines = [\"local\"]\n").unwrap();
    let out = mucheck(&["bench", "m.toml", "--timeout", "0.05"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[4], "timeout");
    assert_eq!(row[8], "true");
    assert_eq!((row[5], row[6]), ("", ""));
}

#[test]
fn bench_records_cell_errors() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("m.toml"), "[[sweep]]\nfamily = \"castle\"\nparams = [[1, 1]]\nengines = [\"game\"]\n").unwrap();
    let out = mucheck(&["bench", "m.toml"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).lines().nth(1).unwrap().contains("error: parameter out of range"));
    fs::write(dir.path().join("bad.toml"), "[[sweep]]\nfamily = \"nope\"\nsizes = [1]\n").unwrap();
    assert_eq!(mucheck(&["bench", "bad.toml"], dir.path()).status.code(), Some(2));
}

#[test]
fn pgsolver_export_and_import() {
    let dir = TempDir::new().unwrap();
    kripke(dir.path(), "nu X. p & <>X");
    let out = mucheck(&["export-pg", "k.model", "k.mu", "--state", "a", "--out", "k.gm"], dir.path());
    assert!(out.status.success());
    let game = fs::read_to_string(dir.path().join("k.gm")).unwrap();
    assert!(game.starts_with("parity "));
    assert!(game.contains("\"a|0\""), "{game}");
    let out = mucheck(&["import-pg", "k.gm", "--out", "k2.model"], dir.path());
    assert!(out.status.success());
    let sol = stdout(&out);
    assert!(sol.starts_with("paritysol "));
    // p fails at a, so the root position is won by the universal player
    assert!(sol.lines().nth(1).unwrap().starts_with("0 1"), "{sol}");
    assert!(fs::read_to_string(dir.path().join("k2.model")).unwrap().contains("\"powerset\""));

    // generated parity games import and their entry positions agree with chi
    mucheck(&["gen", "ladder", "3"], dir.path());
    let out = mucheck(&["import-pg", "ladder-none-3.gm"], dir.path());
    assert!(out.status.success());
    fs::write(dir.path().join("bad.gm"), "parity 0;\n0 0 0 7 \"x\";\n").unwrap();
    let out = mucheck(&["import-pg", "bad.gm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
