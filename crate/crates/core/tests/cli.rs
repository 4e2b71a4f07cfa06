use std::path::Path;
use std::process::{Command, Output};

fn qnahm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnahm")).args(args).output().expect("run qnahm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn builtin_verify_exits_zero() {
    let o = qnahm(&["verify", "--builtin", "thm11", "--k", "3", "--lambda", "1", "--which", "3", "--order", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("to q^30: match"));
}

#[test]
fn json_report_follows_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "two.qid",
        "identity \"first\" { matrix = [[2]]; rhs = P(1, 1, 5)^-1 * P(1, 4, 5)^-1; order = 20; }\n\
         identity \"second\" { matrix = [[2]]; B = [1]; rhs = P(1, 2, 5)^-1 * P(1, 3, 5)^-1; order = 20; }\n",
    );
    let o = qnahm(&["verify", "--file", &f, "--report", "json", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["first", "second"]);
    assert_eq!(v[0]["certificates"][0]["pivots"][0], "2");
}

#[test]
fn wrong_identity_exits_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "wrong.qid", "identity \"w\" { matrix = [[2]]; rhs = P(1, 1, 5)^-1 * P(1, 3, 5)^-1; }");
    let o = qnahm(&["verify", "--file", &f]);
    assert_eq!(o.status.code(), Some(1));
    // 1 + q + q² + q³ + 2q⁴ against 1 + q + q² + 2q³
    assert!(stdout(&o).contains("first mismatch at x^0 q^3: lhs 1 rhs 2"), "{}", stdout(&o));
}

#[test]
fn malformed_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for (text, pos) in [
        ("identity \"a\" {\n  matrix = [[2]]\n  rhs = invq;\n}", ":2:17:"),
        ("identity \"a\" { matrix = [[2]]; rhs = invq; $ }", ":1:44:"),
        ("identity a { }", ":1:10:"),
        ("identity \"a\" { matrix = [[2]]; colour = 3; rhs = invq; }", ":1:32:"),
        ("identity \"a\" { matrix = [[2]]; rhs = invq;", ":1:43:"),
    ] {
        let f = write(dir.path(), "bad.qid", text);
        let o = qnahm(&["verify", "--file", &f]);
        assert_eq!(o.status.code(), Some(2), "{text}: {}", stderr(&o));
        assert!(stderr(&o).contains(&format!("bad.qid{pos}")), "{text}: {}", stderr(&o));
    }
}

#[test]
fn invalid_specs_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "npd.qid", "identity \"n\" {\n  matrix = tildeA(3, 1);\n  rhs = invq;\n}\n");
    let o = qnahm(&["verify", "--file", &f]);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr(&o);
    assert!(e.contains("npd.qid:2:3:") && e.contains("pivot 3 is 0"), "{e}");

    let f = write(dir.path(), "arity.qid", "identity \"n\" { matrix = G(2, 3); rhs = invq; }");
    assert_eq!(qnahm(&["verify", "--file", &f]).status.code(), Some(3));
    let o = qnahm(&["verify", "--builtin", "thm11", "--k", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("thm11 needs --"), "{}", stdout(&o));
    assert_eq!(qnahm(&["verify", "--builtin", "nonesuch"]).status.code(), Some(3));
}

#[test]
fn expand_matches_the_enumerator() {
    let o = qnahm(&["expand", "--builtin", "thm12", "--k", "2", "--a", "2", "--order", "6", "--side", "lhs"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect();
    let spec = qnahm::nahm::NahmSpec::new(qnahm::cartan::tilde_a(2, &qnahm::rational::int(2)).unwrap())
        .unwrap()
        .with_xweight(vec![1, -1])
        .unwrap();
    let s = qnahm::nahm::nahm_sum(&spec, &qnahm::rational::int(6));
    let dump = qnahm::qseries::SeriesDump::from_xseries(&s);
    let want: Vec<String> = dump.terms.iter().map(|r| format!("{} {} {}", r.0, r.1, r.3 .0)).collect();
    assert_eq!(lines, want);
}

#[test]
fn golden_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let case = ["--builtin", "section4", "--case", "halfD3", "--order", "10"];
    for side in ["lhs", "rhs"] {
        let dump = qnahm(&[&["expand", "--format", "json", "--side", side][..], &case[..]].concat());
        let g = write(dir.path(), "g.json", &stdout(&dump));
        let o = qnahm(&[&["verify", "--golden", &g, "--side", side][..], &case[..]].concat());
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let dump = qnahm(&[&["expand", "--format", "json"][..], &case[..]].concat());
    let mut v: serde_json::Value = serde_json::from_str(&stdout(&dump)).unwrap();
    v["terms"][4][3] = serde_json::json!(v["terms"][4][3].as_i64().unwrap() - 1);
    let (x, e) = (v["terms"][4][0].clone(), v["terms"][4][1].clone());
    let g = write(dir.path(), "g.json", &v.to_string());
    let o = qnahm(&[&["verify", "--golden", &g, "--report", "json"][..], &case[..]].concat());
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["first_mismatch"]["x_degree"], x);
    assert_eq!(r["first_mismatch"]["exponent"], e.to_string());

    let g = write(dir.path(), "junk.json", "{\"terms\": 3}");
    assert_eq!(qnahm(&[&["verify", "--golden", &g][..], &case[..]].concat()).status.code(), Some(3));
}

#[test]
fn bailey_subcommand() {
    let o = qnahm(&["bailey", "--pair", "random", "--e", "3/2", "--chain", "s1,lift,s1,reduce", "--limit", "--report", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["relation"], "match");
    assert_eq!(v["limit"], "match");
    assert_eq!(v["e"], "3/2");

    let o = qnahm(&["bailey", "--proof", "4", "--k", "4", "--lambda", "3", "--order", "15"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("steps lift,s1,s1"));

    // a prefix that is too short for the requested order
    let o = qnahm(&["bailey", "--pair", "unit", "--len", "2", "--limit", "--order", "30"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("insufficient"));

    assert_eq!(qnahm(&["bailey", "--pair", "unit", "--e", "-1"]).status.code(), Some(3));
    assert_eq!(qnahm(&["bailey", "--chain", "s2"]).status.code(), Some(3));
}

#[test]
fn list_and_usage() {
    let o = qnahm(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for f in ["rr", "thm11", "section4", "bailey"] {
        assert!(s.contains(&format!("  {f} ")), "{f}");
    }
    assert_eq!(qnahm(&["verify"]).status.code(), Some(2));
    assert_eq!(qnahm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qnahm(&["--help"]).status.code(), Some(0));
}
