use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_ligand-swarm");

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

fn write_genome(dir: &TempDir, name: &str, genes: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, genes).unwrap();
    path.display().to_string()
}

fn all_null() -> String {
    vec!["44.0"; 15].join(";")
}

/// Root N (valency 3) with OH, NH2 and CH3 leaves.
fn four_node() -> String {
    let mut genes = vec!["44"; 15];
    genes[..4].copy_from_slice(&["34", "4", "6", "7"]);
    genes.join(";")
}

fn design(out: &Path, extra: &[&str]) -> Output {
    let site = data("rhinovirus.site");
    let catalog = data("default.cat");
    let mut args = vec![
        "design",
        "--site",
        site.to_str().unwrap(),
        "--catalog",
        catalog.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn design_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = design(&a, &["--seed", "7"]);
    let second = design(&b, &["--seed", "7", "--sequential"]);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(second.status.success(), "{}", stderr(&second));
    for name in ["report.txt", "structure.txt", "genome.txt"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let strip = |p: &Path| -> Vec<String> {
        fs::read_to_string(p.join("manifest.txt"))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("timestamp=") && !l.starts_with("parallel=") && !l.starts_with("input.site="))
            .map(str::to_string)
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(stdout(&first), stdout(&second).replace(b.to_str().unwrap(), a.to_str().unwrap()));
}

#[test]
fn manifest_echoes_protocol_defaults() {
    let dir = TempDir::new().unwrap();
    let out = design(dir.path(), &["--seed", "3"]);
    assert!(out.status.success());
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert_eq!(value(&manifest, "population"), Some("50"));
    assert_eq!(value(&manifest, "generations"), Some("100"));
    assert_eq!(value(&manifest, "seed"), Some("3"));
    assert_eq!(value(&manifest, "algorithm"), Some("pso"));
    assert_eq!(value(&manifest, "tool.version"), Some(env!("CARGO_PKG_VERSION")));
    assert_eq!(manifest.lines().filter(|l| l.starts_with("timestamp=")).count(), 1);
    let digest = value(&manifest, "input.site.sha256").unwrap();
    assert_eq!(digest.len(), 64);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
    let keys: Vec<&str> = manifest.lines().map(|l| l.split('=').next().unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn evaluate_reproduces_design_energy() {
    let dir = TempDir::new().unwrap();
    for algo in ["pso", "ga", "random"] {
        let out_dir = dir.path().join(algo);
        let out = design(&out_dir, &["--seed", "11", "--algo", algo, "--gens", "20"]);
        assert!(out.status.success(), "{}", stderr(&out));
        let printed = value(&stdout(&out), "e_total").unwrap().to_string();
        let report = fs::read_to_string(out_dir.join("report.txt")).unwrap();
        assert_eq!(value(&report, "e_total"), Some(printed.as_str()));
        let genome = out_dir.join("genome.txt");
        let site = data("rhinovirus.site");
        let eval = run(&["evaluate", "--site", site.to_str().unwrap(), "--genome", genome.to_str().unwrap()]);
        assert!(eval.status.success());
        assert_eq!(stdout(&eval), report);
        let printed_out = stdout(&out);
        let fitness = value(&printed_out, "fitness").unwrap();
        let e: f64 = printed.parse().unwrap();
        assert_eq!(fitness.starts_with("undefined"), e <= 0.0);
    }
}

#[test]
fn evaluate_empty_ligand_sentinel() {
    let dir = TempDir::new().unwrap();
    let genome = write_genome(&dir, "g.txt", &all_null());
    let site = data("plasmodium.site");
    let out = run(&["evaluate", "--site", site.to_str().unwrap(), "--genome", &genome]);
    assert!(out.status.success());
    assert_eq!(value(&stdout(&out), "e_total"), Some("1000000"));
    assert_eq!(value(&stdout(&out), "empty_ligand"), Some("true"));
}

#[test]
fn malformed_genomes_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let site = data("plasmodium.site");
    let cases = [
        ("short.txt", vec!["1"; 14].join(";")),
        ("high.txt", format!("45;{}", vec!["1"; 14].join(";"))),
        ("negative.txt", format!("-0.5;{}", vec!["1"; 14].join(";"))),
        ("word.txt", format!("x;{}", vec!["1"; 14].join(";"))),
    ];
    for (name, text) in cases {
        let genome = write_genome(&dir, name, &text);
        let out = run(&["evaluate", "--site", site.to_str().unwrap(), "--genome", &genome]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(stderr(&out).contains(name), "{name}: {}", stderr(&out));
    }
}

#[test]
fn missing_and_broken_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.site");
    let out = design(&dir.path().join("o"), &[]);
    assert!(out.status.success());
    let out = run(&["design", "--site", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nope.site"));

    let broken = dir.path().join("broken.site");
    fs::write(&broken, "site;x\naxis;0;0;1;0\nresidue;A;0;0;1;polar-\npose;0;0;+1\n").unwrap();
    let out = run(&["design", "--site", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let catalog = dir.path().join("short.cat");
    let text: String = fs::read_to_string(data("default.cat")).unwrap().lines().take(20).map(|l| format!("{l}\n")).collect();
    fs::write(&catalog, text).unwrap();
    let site = data("plasmodium.site");
    let out = run(&["design", "--site", site.to_str().unwrap(), "--catalog", catalog.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("short.cat"));
}

#[test]
fn bad_flags_exit_3() {
    let dir = TempDir::new().unwrap();
    let site = data("plasmodium.site");
    let site = site.to_str().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["design", "--site", site, "--out", out_dir, "--pop", "1"],
        vec!["design", "--site", site, "--out", out_dir, "--gens", "0"],
        vec!["design", "--site", site, "--out", out_dir, "--poses", "0"],
        vec!["design", "--site", site, "--out", out_dir, "--poses", "9"],
        vec!["design", "--site", site, "--out", out_dir, "--algo", "ga", "--stall-gens", "5"],
        vec!["design", "--site", site, "--out", out_dir, "--clash-penalty", "-1"],
        vec!["design", "--site", site, "--out", out_dir, "--r-min", "3", "--r-max", "2"],
        vec!["design", "--site", site, "--out", out_dir, "--algo", "tabu"],
        vec!["design", "--site", site, "--seed", "minus-one"],
        vec!["compare", "--site", site, "--budget", "510", "--seeds", "1"],
        vec!["oracle", "--site", site, "--subset", "0,1,2,3,4,5,6,7,8"],
        vec!["oracle", "--site", site, "--subset", "1,1", "--depth", "2"],
        vec!["oracle", "--site", site],
        vec!["frobnicate"],
        vec![],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["design", "--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn render_draws_one_circle_per_node() {
    let dir = TempDir::new().unwrap();
    let site = data("rhinovirus.site");
    let site = site.to_str().unwrap();
    let genome = write_genome(&dir, "four.txt", &four_node());
    let svg_path = dir.path().join("four.svg");
    let out = run(&["render", "--site", site, "--genome", &genome, "--out", svg_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let svg = fs::read_to_string(&svg_path).unwrap();
    let doc = roxmltree::Document::parse(&svg).expect("well-formed XML");
    let class_count = |tag: &str, class: &str| {
        doc.descendants()
            .filter(|n| n.has_tag_name(tag) && n.attribute("class") == Some(class))
            .count()
    };
    assert_eq!(doc.root_element().attribute("version"), Some("1.1"));
    assert_eq!(class_count("circle", "node"), 4);
    assert_eq!(class_count("line", "bond"), 3);
    assert_eq!(class_count("circle", "residue"), 10);
    let axis: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("axis")).collect();
    assert_eq!(axis.len(), 1);
    assert!(axis[0].attribute("stroke-dasharray").is_some());
    let labels: Vec<&str> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("node-label"))
        .filter_map(|n| n.text())
        .collect();
    assert_eq!(labels, vec!["N", "OH", "NH2", "CH3"]);
    // node radius is half the group length, in the same pixel scale for every node
    let radii: Vec<f64> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("node"))
        .map(|n| n.attribute("r").unwrap().parse().unwrap())
        .collect();
    assert!((radii[0] / radii[3] - 1.0 / 1.1).abs() < 1e-3);

    let empty = write_genome(&dir, "empty.txt", &all_null());
    let out = run(&["render", "--site", site, "--genome", &empty]);
    assert!(out.status.success());
    let svg = stdout(&out);
    let doc = roxmltree::Document::parse(&svg).expect("well-formed XML");
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("node")).count(), 0);
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("bond")).count(), 0);
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("residue")).count(), 10);
}

#[test]
fn render_rejects_bad_genome() {
    let dir = TempDir::new().unwrap();
    let site = data("rhinovirus.site");
    let genome = write_genome(&dir, "bad.txt", "1;2;3");
    let out = run(&["render", "--site", site.to_str().unwrap(), "--genome", &genome]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_and_oracle_are_deterministic() {
    let site = data("hiv1_protease.site");
    let site = site.to_str().unwrap();
    let args = ["compare", "--site", site, "--seeds", "1,2,3", "--budget", "500"];
    let a = run(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&run(&args)));
    let text = stdout(&a);
    for algo in ["pso", "ga", "random"] {
        for seed in 1..=3 {
            assert_eq!(value(&text, &format!("{algo}.seed[{seed}].evaluations")), Some("500"));
        }
    }

    let args = ["oracle", "--site", site, "--subset", "0,11,23,34", "--depth", "3"];
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), stdout(&run(&args)));
    assert_eq!(value(&stdout(&o), "evaluations"), Some("64"));
}

#[test]
fn commands_leave_inputs_untouched() {
    let dir = TempDir::new().unwrap();
    let site = dir.path().join("site.site");
    let catalog = dir.path().join("cat.cat");
    fs::copy(data("plasmodium.site"), &site).unwrap();
    fs::copy(data("default.cat"), &catalog).unwrap();
    let genome = write_genome(&dir, "g.txt", &four_node());
    let before: Vec<Vec<u8>> = [&site, &catalog].iter().map(|p| fs::read(p).unwrap()).collect();
    let genome_before = fs::read(&genome).unwrap();
    let (s, c) = (site.to_str().unwrap(), catalog.to_str().unwrap());
    let out_dir = dir.path().join("out");
    for args in [
        vec!["design", "--site", s, "--catalog", c, "--gens", "5", "--out", out_dir.to_str().unwrap()],
        vec!["evaluate", "--site", s, "--catalog", c, "--genome", &genome],
        vec!["render", "--site", s, "--catalog", c, "--genome", &genome],
    ] {
        assert!(run(&args).status.success(), "{args:?}");
    }
    let after: Vec<Vec<u8>> = [&site, &catalog].iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(before, after);
    assert_eq!(genome_before, fs::read(&genome).unwrap());
}
