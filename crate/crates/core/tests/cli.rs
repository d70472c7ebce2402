use std::process::Command;

fn conecat(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_conecat")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

const OCTA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/octa.json");

#[test]
fn chern_on_ceva() {
    let (code, out, _) = conecat(&["arrangement", "chern", "--name", "A3_0_3", "--b", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("c1²=9/4") && out.contains("3e=9/4") && out.contains("BALL_QUOTIENT_EQUALITY"));
}

#[test]
fn octahedron_file_is_confirmed() {
    let (code, out, _) = conecat(&["surface", "certify", "--file", OCTA, "--edge-angles", "16"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("CAT_CONFIRMED"));
    assert!(out.contains("large triangles, valence at least four"));
}

#[test]
fn noncat_exits_1() {
    let (code, out, _) = conecat(&["cone", "noncat", "--alpha-min", "3.14159265", "--n", "2"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("NOT_CAT"));
    let (code, _, _) = conecat(&["cone", "noncat", "--alpha-min", "1", "--n", "2"]);
    assert_eq!(code, 0);
}

#[test]
fn not_cat_surface_exits_1() {
    let (code, _, _) = conecat(&["surface", "certify", "--double-angles", "pi/2,pi/2,pi/2"]);
    assert_eq!(code, 1);
    let (code, _, _) = conecat(&["cone", "verdict", "--double-angles", "pi/2,pi/2,pi/2"]);
    assert_eq!(code, 1);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kappa": 4, "triangles": [{"sides": [0.5, 0.5, 0.5]}], "gluing": []}"#).unwrap();
    for args in [
        vec!["surface", "build", "--file", bad.to_str().unwrap()],
        vec!["surface", "build", "--file", "/nonexistent.json"],
        vec!["arrangement", "chern", "--name", "A3_0_3", "--b", "3"],
        vec!["arrangement", "certify", "--name", "A1_6", "--b", "7,7,2,7,2,2"],
        vec!["surface", "cover", "--angles", "pi/2,pi/2,pi/2", "--mult", "3,3,3"],
        vec!["cone", "fiber", "--double-angles", "pi/2,pi/2,pi/2", "--kappa", "0"],
        vec!["family", "lipschitz", "--sphere", "--sampling", "0"],
        vec!["surface", "geodesics", "--sphere", "--edge-angles", "0"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = conecat(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn build_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cover.json");
    let p = path.to_str().unwrap();
    let (code, _, _) = conecat(&["surface", "cover", "--angles", "2pi/3,2pi/3,2pi/3", "--mult", "2,2,2", "--out", p]);
    assert_eq!(code, 0);
    let (code, out, _) = conecat(&["--format", "json", "surface", "build", "--file", p]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["surface"]["triangles"], 8);
    assert_eq!(v["surface"]["euler_characteristic"], 2);
    // cone angles 8π/3 exceed 2π: no covering radius
    let (code, _, _) = conecat(&["surface", "build", "--file", p, "--covering", "6"]);
    assert_eq!(code, 2);
    let (code, out, _) = conecat(&["--format", "json", "surface", "build", "--double-angles", "2pi/3,2pi/3,2pi/3", "--covering", "6"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["covering_radius"]["within_pi_over_4"].as_bool().unwrap());
}

#[test]
fn json_reports_are_byte_identical() {
    for args in [
        &["--format", "json", "arrangement", "kummer", "--name", "A1_7", "--n", "3", "--c", "0.7"][..],
        &["--format", "json", "surface", "geodesics", "--double-angles", "2pi/3,2pi/3,2pi/3", "--edge-angles", "16"][..],
        &["--format", "json", "family", "member", "--sphere", "--kappa2", "1", "--vertex", "0"][..],
    ] {
        let a = conecat(args);
        let b = conecat(args);
        assert_ne!(a.0, 2, "{}", a.2);
        assert_eq!(a, b);
    }
}

#[test]
fn svg_outputs() {
    let (code, out, _) = conecat(&["--format", "svg", "surface", "cover", "--angles", "pi/2,pi/2,pi/2", "--mult", "2,3,4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("<svg") && out.contains("48 tiles"));
    let (code, out, _) = conecat(&["--format", "svg", "surface", "geodesics", "--sphere", "--edge-angles", "12"]);
    assert_eq!(code, 0);
    assert!(out.contains("<polyline"));
}

#[test]
fn hemisphere_and_holonomy() {
    let (code, out, _) = conecat(&["cone", "hemisphere", "--point", "1,0,0", "--point", "-1,0,0"]);
    assert_eq!(code, 0);
    assert!(out.contains("in_no_open_hemisphere = true"));
    let (code, out, _) = conecat(&["cone", "holonomy", "--sphere", "--area", "pi/2"]);
    assert_eq!(code, 0);
    assert!(out.contains("holonomy.residue = 3.14159265359"));
}
