use std::io::Write;
use std::process::{Command, Output};

fn lgfano(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgfano"))
        .args(args)
        .env_remove("LGFANO_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn corpus_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn report_cubic_surface() {
    let out = lgfano(&["report", "3@3", "--probes", "20", "--terms", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["model"], "3@3");
    assert_eq!(v["verdicts"]["theorem_count"]["status"], "evidence_only");
    for k in ["critical_values", "odp", "spectrum", "periods"] {
        assert_eq!(v["verdicts"][k]["status"], "pass", "{k}");
    }
    assert_eq!(v["hessian"][0]["rank"], 2);
    assert_eq!(v["invariants"]["h1nm1"], "7");
    assert!(v.get("timings").is_none());
}

#[test]
fn report_markdown_and_csv() {
    let md = lgfano(&["report", "2,2@5", "--probes", "8", "--terms", "4", "--format", "markdown"]);
    assert_eq!(md.status.code(), Some(0));
    let text = String::from_utf8(md.stdout).unwrap();
    assert!(text.contains("| 2,2@5 | 3 | 2 | 16 | 8; -8 | 3 3 |"), "{text}");
    let csv = lgfano(&["report", "@1", "--probes", "8", "--terms", "4", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("@1,1,2,1,2; -2,1 1,"));
}

#[test]
fn validation_errors_exit_2() {
    let out = lgfano(&["report", "5@4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not Fano"));
    let out = lgfano(&["model", "3@x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`x`"));
    let out = lgfano(&["report", "@2", "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precision_env_var() {
    let out = Command::new(env!("CARGO_BIN_EXE_lgfano"))
        .args(["model", "@1"])
        .env("LGFANO_PRECISION", "32")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_lgfano"))
        .args(["report", "@1", "--probes", "4", "--terms", "2"])
        .env("LGFANO_PRECISION", "128")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["precision"], 128);
}

#[test]
fn corpus_validation_error_row() {
    let f = corpus_file("@1\n5@4\n");
    let out = lgfano(&["corpus", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["status"], "validation_error");
    assert_eq!(v["errors"][0]["line"], 2);
    assert_eq!(v["errors"][0]["descriptor"], "5@4");
    assert_eq!(v["reports"].as_array().unwrap().len(), 0);
}

#[test]
fn empty_corpus_succeeds() {
    let f = corpus_file("# nothing here\n\n");
    let out = lgfano(&["corpus", f.path().to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn corpus_output_independent_of_workers() {
    let f = corpus_file("@2\n2@3\n3@3\n@1\n");
    let path = f.path().to_str().unwrap();
    let base = ["corpus", path, "--probes", "16", "--terms", "6", "--workers"];
    let one = lgfano(&[&base[..], &["1"]].concat());
    let four = lgfano(&[&base[..], &["4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let v = json(&one);
    let models: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["model"].as_str().unwrap()).collect();
    assert_eq!(models, vec!["@2", "2@3", "3@3", "@1"]);
}

#[test]
fn stage_subcommands() {
    let v = json(&lgfano(&["model", "2@3"]));
    assert_eq!(v["index"], 2);
    assert_eq!(v["dconst"], "4");
    assert_eq!(v["variables"], serde_json::json!(["x1_1", "y1"]));

    let out = lgfano(&["periods", "@1", "--terms", "4", "--format", "csv"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "m,constant_term,closed_form,equal\n0,1,1,true\n1,0,0,true\n2,2,2,true\n3,0,0,true\n4,6,6,true\n"
    );

    let v = json(&lgfano(&["critical", "@1", "--probes", "50"]));
    assert_eq!(v["probed_points"].as_array().unwrap().len(), 2);

    let out = lgfano(&["hessian", "3@4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["points"][0]["extracted_matrix"][0][1], "-9 mod t^2 - 27");
    assert_eq!(v["points"][0]["convention_match"]["expansion"], true);

    let out = lgfano(&["spectrum", "@3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["matched"], true);
    assert_eq!(v["characteristic_polynomial"], serde_json::json!(["-1", "0", "0", "0", "1"]));
    assert_eq!(v["note"], "primitive part omitted");
}
