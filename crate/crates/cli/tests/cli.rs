use std::process::{Command, Output};

use quatideal::experiments::CensusRow;
use quatideal::forms::ClassGroupDescription;
use quatideal_cli::{ClassNumberReport, CycleReport, DetailRow, FactorReport, IdealReport, ModuleReport, OrderOfReport, OrderReport, ThreeSquaresReport};

fn quatideal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatideal")).args(args).env_remove("QUATIDEAL_THREADS").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = quatideal(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("quatideal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn three_squares_text_and_json() {
    assert_eq!(stdout(&["three-squares", "21"]).trim(), "21 = 4^2 + 2^2 + 1^2");
    let r: ThreeSquaresReport = serde_json::from_str(&stdout(&["three-squares", "21", "--all", "--json"])).unwrap();
    assert_eq!(r.representations, vec![[4, 2, 1]]);
    let text = stdout(&["three-squares", "893", "--all"]);
    let r: ThreeSquaresReport = serde_json::from_str(&stdout(&["three-squares", "893", "--all", "--json"])).unwrap();
    assert_eq!(text.lines().count(), r.representations.len());
    for [x, y, z] in r.representations {
        assert!(text.contains(&format!("893 = {x}^2 + {y}^2 + {z}^2")));
    }
}

#[test]
fn make_order_renders_compactly() {
    let text = stdout(&["make-order", "29,4,6"]);
    assert!(text.starts_with("O(29i+4j+6k)"), "{text}");
    let r: OrderReport = serde_json::from_str(&stdout(&["make-order", "29,4,6", "--json"])).unwrap();
    assert_eq!(r.order.to_string(), "O(29i+4j+6k)");
    assert_eq!(r.discriminant, (-3572).into());
    let raw: serde_json::Value = serde_json::from_str(&stdout(&["make-order", "29,4,6", "--json"])).unwrap();
    assert_eq!(raw["order"]["mu"], serde_json::json!({"da": 0, "db": 58, "dc": 8, "dd": 12}));
}

#[test]
fn cycle_of_893_lists_fourteen_orders() {
    let text = stdout(&["cycle", "--m", "893", "--mu", "29,4,6", "--ideal", "23,21"]);
    assert!(text.contains("f = 14"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with('μ')).count(), 14);
    let r: CycleReport = serde_json::from_str(&stdout(&["cycle", "--m", "893", "--mu", "29,4,6", "--ideal", "23,21", "--json"])).unwrap();
    assert_eq!(r.length, 14);
    assert_eq!(r.cycle.orders.len(), 14);
    assert_eq!(r.class_order.order, 14);
}

#[test]
fn cycle_search_modes() {
    let sep: CycleReport =
        serde_json::from_str(&stdout(&["cycle", "--mu", "42,14,1", "--ideal", "18,1", "--order-search", "separation", "--json"])).unwrap();
    assert_eq!(sep.separated, Some(true));
    assert!(!sep.class_order.fell_back);
    let brute: CycleReport =
        serde_json::from_str(&stdout(&["cycle", "--mu", "42,14,1", "--ideal", "5,2", "--order-search", "bruteforce", "--json"])).unwrap();
    assert_eq!(brute.separated, Some(false));
    assert_eq!(brute.class_order.order, 8);
    let o: OrderOfReport = serde_json::from_str(&stdout(&["order-of", "--mu", "42,14,1", "--ideal", "5,2", "--json"])).unwrap();
    assert_eq!(o.class_order.order, 8);
    assert_eq!(stdout(&["order-of", "--mu", "42,14,1", "--ideal", "5,2"]).trim(), "8");
}

#[test]
fn census_json_csv_and_progress() {
    let row: CensusRow = serde_json::from_str(&stdout(&["census", "--limit", "1000", "--json", "-"])).unwrap();
    assert_eq!((row.count_sigma, row.count_a, row.argmax_m, row.argmax_count), (379, 151, 645, 4));
    let raw: serde_json::Value = serde_json::from_str(&stdout(&["census", "--limit", "1000", "--json", "-"])).unwrap();
    assert_eq!((raw["sigma"].as_u64(), raw["a"].as_u64()), (Some(379), Some(151)));

    let json_path = tmp("row.json");
    let csv_path = tmp("details.csv");
    let out = quatideal(&[
        "census",
        "--limit",
        "20000",
        "--json",
        json_path.to_str().unwrap(),
        "--details",
        csv_path.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.starts_with("census:")).count(), 2, "{stderr}");
    let text = String::from_utf8(out.stdout).unwrap();
    let row: CensusRow = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert!(text.contains(&row.count_sigma.to_string()) && text.contains(&row.count_a.to_string()));

    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["m", "x", "y", "z", "ambiguous_class_count", "factor_found"]);
    let rows: Vec<DetailRow> = rdr.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len() as u64, row.count_sigma);
    assert_eq!(rows.iter().filter(|r| r.ambiguous_class_count > 0).count() as u64, row.count_a);
    let r21 = rows.iter().find(|r| r.m == 21).unwrap();
    assert_eq!((r21.x, r21.y, r21.z, r21.ambiguous_class_count), (Some(4), Some(2), Some(1), 1));
    assert!(r21.factor_found == Some(3) || r21.factor_found == Some(7));
}

#[test]
fn thread_count_from_environment() {
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_quatideal"))
            .args(["census", "--limit", "500", "--json", "-", "--threads", "1"])
            .env("QUATIDEAL_THREADS", env)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn factor_trace_round_trips() {
    let r: FactorReport = serde_json::from_str(&stdout(&["factor", "21"])).unwrap();
    let w = r.witness.unwrap();
    assert!(w.factor == 3.into() || w.factor == 7.into());
    let r: FactorReport = serde_json::from_str(&stdout(&["factor", "65", "--two-squares"])).unwrap();
    assert!(r.witness.is_some());
    let r: FactorReport = serde_json::from_str(&stdout(&["factor", "13", "--single-rep"])).unwrap();
    assert!(r.witness.is_none());
    assert_eq!(stdout(&["factor", "65", "--two-squares", "--text"]).trim(), "65 = 5 * 13");
}

#[test]
fn class_group_and_number() {
    let g: ClassGroupDescription = serde_json::from_str(&stdout(&["class-group", "-9240", "--json"])).unwrap();
    assert_eq!((g.h, g.elementary_divisors.clone()), (32, vec![4, 2, 2, 2]));
    assert!(stdout(&["class-group", "-9240"]).contains("Z/4 x Z/2 x Z/2 x Z/2"));
    let n: ClassNumberReport = serde_json::from_str(&stdout(&["class-number", "-84", "--json"])).unwrap();
    assert_eq!(n.h, 4);
    assert_eq!(stdout(&["class-number", "-84"]).trim(), "4");
}

#[test]
fn ideal_operations() {
    let base = ["--m", "893", "--mu", "29,4,6", "--ideal", "23,21", "--json"];
    let run = |op: &str, extra: &[&str]| -> IdealReport {
        let mut args = vec!["ideal", op];
        args.extend_from_slice(&base);
        args.extend_from_slice(extra);
        serde_json::from_str(&stdout(&args)).unwrap()
    };
    match run("restore", &[]) {
        IdealReport::Restore { input, result } => assert_eq!(input, result.z_basis),
        r => panic!("{r:?}"),
    }
    match run("mul", &["--with", "23,21"]) {
        IdealReport::Mul { result, .. } => assert_eq!(result.norm, 529.into()),
        r => panic!("{r:?}"),
    }
    match run("reduce", &[]) {
        IdealReport::Reduce { input, result } => assert!(result.norm <= input.norm),
        r => panic!("{r:?}"),
    }
    match run("conj", &[]) {
        IdealReport::Conj { input, result } => assert_eq!(result.norm, input.norm),
        r => panic!("{r:?}"),
    }
    match run("check", &[]) {
        IdealReport::Check { all_hold, .. } => assert!(all_hold),
        r => panic!("{r:?}"),
    }
    match run("left-right", &[]) {
        IdealReport::LeftRight { input, right_again, .. } => assert_eq!(&right_again, input.ideal.rho()),
        r => panic!("{r:?}"),
    }
}

#[test]
fn solve_module_prints_the_norm_form() {
    let r: ModuleReport = serde_json::from_str(&stdout(&["solve-module", "--mu", "4,2,1", "--mu-prime", "-4,-2,-1", "--json"])).unwrap();
    let text = stdout(&["solve-module", "--mu", "4,2,1", "--mu-prime", "-4,-2,-1"]);
    assert!(text.contains(&format!("norm form {}", r.norm_form)));
    assert!(r.norm_form.discriminant() < 0.into());
}

#[test]
fn exit_codes() {
    assert_eq!(quatideal(&["three-squares", "7"]).status.code(), Some(1));
    assert_eq!(quatideal(&["make-order", "2,2,0"]).status.code(), Some(1));
    assert_eq!(quatideal(&["cycle", "--m", "22", "--mu", "29,4,6", "--ideal", "23,21"]).status.code(), Some(1));
    assert_eq!(quatideal(&["ideal", "reduce", "--mu", "4,2,1", "--ideal", "0,1"]).status.code(), Some(1));
    assert_eq!(quatideal(&["make-order", "a,b"]).status.code(), Some(2));
    assert_eq!(quatideal(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(quatideal(&["ideal", "mul", "--mu", "4,2,1", "--ideal", "5,2"]).status.code(), Some(2));
    assert_eq!(quatideal(&["factor", "65", "--pairs", "--single-rep"]).status.code(), Some(2));
    let usage = quatideal(&["census"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
    assert!(usage.stdout.is_empty());
}
