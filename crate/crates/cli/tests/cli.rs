mod common;

use common::{csv_rows, json, schema_errors, tlspin};

#[test]
fn verify_default_passes_and_validates() {
    let r = tlspin(&["verify"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let doc = json(&r);
    assert_eq!(schema_errors("verify.schema.json", &doc), Vec::<String>::new());
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["informational"]["single_basis_compatible"], false);
    for c in doc["checks"].as_array().unwrap() {
        assert_eq!(c["status"], "pass", "{c}");
    }
}

#[test]
fn verify_other_sign_passes() {
    assert_eq!(tlspin(&["verify", "--phi", "0", "--eps", "-1"]).code, 0);
}

#[test]
fn verify_detects_injected_fault() {
    let r = tlspin(&["verify", "--perturb", "1e-6"]);
    assert_eq!(r.code, 1);
    let doc = json(&r);
    assert!(schema_errors("verify.schema.json", &doc).is_empty());
    assert_eq!(doc["passed"], false);
    assert!(r.stderr.contains("tl_relations"));
    // a perturbation far below tolerance is not a failure
    assert_eq!(tlspin(&["verify", "--perturb", "0"]).code, 0);
}

#[test]
fn verify_tolerance_override_can_fail_the_run() {
    assert_eq!(tlspin(&["verify", "--tol-abs", "1e-30"]).code, 1);
}

#[test]
fn verify_at_degenerate_point_skips_spectral_checks() {
    let r = tlspin(&["verify", "--delta", "0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let doc = json(&r);
    assert!(schema_errors("verify.schema.json", &doc).is_empty());
    assert!(doc["consistency"].is_null());
    let skipped: Vec<_> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "skipped")
        .collect();
    assert_eq!(skipped.len(), 3);
}

#[test]
fn spectrum_json_and_csv() {
    let r = tlspin(&["spectrum", "--J", "1", "--delta", "0.1"]);
    assert_eq!(r.code, 0);
    let doc = json(&r);
    assert!(schema_errors("spectrum.schema.json", &doc).is_empty());
    assert_eq!(doc["rank"], 4);
    let nonzero: Vec<f64> = doc["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .filter(|v| v.abs() > 1e-10)
        .collect();
    for (got, want) in nonzero.iter().zip([0.9, 1.1, 3.6, 4.4]) {
        assert!((got - want).abs() < 1e-10);
    }

    let r = tlspin(&["spectrum", "--delta", "0", "--format", "csv"]);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows[0], ["energy", "multiplicity"]);
    let mult: Vec<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(mult, ["12", "2", "2"]);
}

#[test]
fn spectrum_warns_on_large_delta() {
    let r = tlspin(&["spectrum", "--delta", "1.5"]);
    assert_eq!(r.code, 0);
    assert!(r.stderr.contains("warning"));
}

#[test]
fn evolve_csv_header_and_endpoint() {
    let r = tlspin(&["evolve", "--J", "1", "--delta", "0.1", "--t-max", "15.70796", "--steps", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&r.stdout);
    assert_eq!(r.stdout.lines().next().unwrap(), "t,p_e1,p_e3,leak");
    assert_eq!(rows.len(), 3);
    let p_e3: f64 = rows[2][2].parse().unwrap();
    assert!((p_e3 - 1.0).abs() < 1e-10);
}

#[test]
fn evolve_json_and_errors() {
    let r = tlspin(&["evolve", "--format", "json", "--steps", "11"]);
    let doc = json(&r);
    assert!(schema_errors("evolve.schema.json", &doc).is_empty());
    assert_eq!(doc["samples"].as_array().unwrap().len(), 11);

    let r = tlspin(&["evolve", "--delta", "0"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.stderr.lines().count(), 1);
    assert_eq!(tlspin(&["evolve", "--steps", "1"]).code, 2);
    assert_eq!(tlspin(&["evolve", "--t-max", "-1"]).code, 2);
}

#[test]
fn zeno_csv() {
    let r = tlspin(&["zeno", "--n", "1"]);
    assert_eq!(r.code, 0);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows[0], ["n", "survival_exact", "survival_analytic", "survival_limit"]);
    assert_eq!(rows[1][0], "1");
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 0.0);

    let r = tlspin(&["zeno", "--n", "2,10,100"]);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 4);
    let s10: f64 = rows[2][1].parse().unwrap();
    assert!((s10 - 0.7805460698).abs() < 1e-9);
}

#[test]
fn zeno_json() {
    let doc = json(&tlspin(&["zeno", "--format", "json"]));
    assert!(schema_errors("zeno.schema.json", &doc).is_empty());
    assert_eq!(doc["runs"].as_array().unwrap().len(), 7);
}

#[test]
fn well_point_and_sweep() {
    let r = tlspin(&["well", "--m", "1", "--L", "2", "--a", "0.5", "--V0", "10", "--hbar", "1"]);
    assert_eq!(r.code, 0);
    let doc = json(&r);
    assert!(schema_errors("well.schema.json", &doc).is_empty());
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 5);
    assert!((doc["xi"].as_f64().unwrap() - 4.472136).abs() < 1e-5);
    assert!((doc["J"].as_f64().unwrap() - 2.19325).abs() < 1e-5);
    assert!((doc["delta"].as_f64().unwrap() - 0.006812).abs() < 1e-5);

    let r = tlspin(&["well", "--sweep", "V0=1:100:log10"]);
    assert_eq!(r.code, 0);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows[0], ["V0", "xi", "J", "delta", "tau", "annotation"]);
    assert_eq!(rows.len(), 11);
    let deltas: Vec<f64> = rows[1..].iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(deltas.windows(2).all(|w| w[1] < w[0]));

    let r = tlspin(&["well", "--sweep", "V0=1:1e5:log10:4"]);
    assert!(r.stdout.lines().last().unwrap().ends_with("independent wells"));

    let doc = json(&tlspin(&["well", "--sweep", "a=0.1:1:lin", "--format", "json"]));
    assert!(schema_errors("well_sweep.schema.json", &doc).is_empty());
}

#[test]
fn well_errors() {
    assert_eq!(tlspin(&["well", "--V0", "1e9"]).code, 1);
    assert_eq!(tlspin(&["well", "--a", "2"]).code, 2);
    assert_eq!(tlspin(&["well", "--sweep", "m=1:2:lin"]).code, 2);
    assert_eq!(tlspin(&["well", "--sweep", "a=0.5:3:lin"]).code, 2);
}

#[test]
fn diagram_loop_and_shapes() {
    let r = tlspin(&["diagram", "cap(1,2:d1);cup(1,2:d1)"]);
    assert_eq!(r.code, 0);
    let doc = json(&r);
    assert!(schema_errors("diagram.schema.json", &doc).is_empty());
    assert_eq!(doc["kind"], "scalar");
    assert_eq!(doc["dim"], 1);
    let z = &doc["data"][0];
    assert!((z[0].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
    assert!(z[1].as_f64().unwrap().abs() < 1e-12);

    let doc = json(&tlspin(&["diagram", "cup(1,2:d1);cap(1,2:d1) + cup(1,2:d2);cap(1,2:d2)"]));
    assert_eq!(doc["kind"], "op");
    assert_eq!(doc["dim"], 4);
    assert_eq!(doc["data"].as_array().unwrap().len(), 16);
    assert!(schema_errors("diagram.schema.json", &doc).is_empty());

    let r = tlspin(&["diagram", "cup(1,2:o1)", "--format", "csv"]);
    assert_eq!(r.stdout.lines().next().unwrap(), "row,col,re,im");
    assert_eq!(r.stdout.lines().count(), 5);
}

#[test]
fn diagram_errors() {
    let r = tlspin(&["diagram", "cup(1,2 d1)"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("syntax error at 1:9"), "{}", r.stderr);
    assert_eq!(tlspin(&["diagram", "cup(1,2:d1)|cup(2,3:d1)"]).code, 1);
    assert_eq!(tlspin(&["diagram", "--file", "/nonexistent/d.txt"]).code, 2);
}

#[test]
fn diagram_from_file() {
    let dir = std::env::temp_dir().join(format!("tlspin-diagram-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("loop.txt");
    std::fs::write(&path, "cap(1,2:o2)\n;\ncup(1,2:o2)\n").unwrap();
    let doc = json(&tlspin(&["diagram", "--file", path.to_str().unwrap()]));
    assert!((doc["data"][0][0].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("tlspin-config-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("model.cfg");
    std::fs::write(&path, "# test\nJ = 2\ndelta = 0.2\nformat = csv\n").unwrap();
    let p = path.to_str().unwrap();

    let r = tlspin(&["spectrum", "--config", p]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&r.stdout);
    let top: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert!((top - 4.0 * 2.0 * 1.2).abs() < 1e-10);

    let r = tlspin(&["spectrum", "--config", p, "--J", "1", "--format", "json"]);
    let doc = json(&r);
    assert_eq!(doc["params"]["J"], 1.0);
    assert_eq!(doc["params"]["delta"], 0.2);

    std::fs::write(&path, "J = 2\nbogus = 1\n").unwrap();
    let r = tlspin(&["spectrum", "--config", p]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["verify"][..],
        &["spectrum", "--phi", "1.1", "--eps", "-1"],
        &["evolve", "--steps", "50"],
        &["zeno"],
        &["well", "--sweep", "V0=1:100:log10"],
        &["diagram", "cup(1,2:d1)|cup(3,4:d2)"],
        &["verify", "--perturb", "1e-3", "--seed", "7"],
    ] {
        let a = tlspin(args);
        let b = tlspin(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.code, b.code);
    }
}

#[test]
fn usage_errors() {
    assert_eq!(tlspin(&[]).code, 2);
    assert_eq!(tlspin(&["spectrum", "--format", "xml"]).code, 2);
    assert_eq!(tlspin(&["spectrum", "--eps", "0"]).code, 2);
    assert_eq!(tlspin(&["zeno", "--n", "1,x"]).code, 2);
    assert_eq!(tlspin(&["verify", "--max-sites", "9"]).code, 2);
    assert_eq!(tlspin(&["verify", "--perturb", "-1"]).code, 2);
    assert_eq!(tlspin(&["--version"]).code, 0);
}
