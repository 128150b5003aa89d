use std::io::Write;
use std::path::PathBuf;

use lensfocus::cli::{run, EXIT_DATA, EXIT_DEGENERATE, EXIT_OK, EXIT_USAGE};

fn lensfocus(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("lensfocus").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn temp_session(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn reproduce_table1() {
    let (code, out, _) = lensfocus(&["reproduce", "--table", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(
        out.contains("  1   3.6    1211  0.2059  21.6     376  0.0639  3.76  26.7"),
        "{out}"
    );
    assert!(out.contains("mean f = -26.9 ± 0.06 cm"));
}

#[test]
fn estimate_table2_final_line() {
    let (code, out, _) = lensfocus(&["estimate", &data("table2.session"), "--mode", "table"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().last().unwrap(), "mean f = 17.2 ± 0.04 cm");
}

#[test]
fn estimate_plotdata_pairs() {
    let (code, out, _) = lensfocus(&[
        "estimate",
        &data("table2.session"),
        "--mode",
        "table",
        "--format",
        "plotdata",
    ]);
    assert_eq!(code, EXIT_OK);
    let pairs: Vec<&str> = out
        .split("\n\n\n")
        .next()
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(
        pairs,
        [
            "27.4 17.3",
            "43.7 17.1",
            "29.5 17",
            "31 17.2",
            "52.3 17.2",
            "112.8 17.1",
            "60.5 17.1",
            "69.1 17.1",
            "38.1 17.1",
            "8.6 17.5"
        ]
    );
}

#[test]
fn estimate_csv_full_precision() {
    let (code, out, _) = lensfocus(&["estimate", &data("table1.session"), "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 11);
    assert!(out.starts_with("obs_no,D1_cm,pixel1,I1_cm,D_cm,pixel2,I2_cm,I_cm,m,f_cm\n"));
}

#[test]
fn simulate_then_estimate() {
    let (code, session, err) = lensfocus(&[
        "simulate",
        "--f",
        "-26.9",
        "--u",
        "-8.8",
        "--O",
        "5",
        "--fc",
        "0.532",
        "--pitch",
        "1.7",
        "--positions",
        "3.6:21.6,5.3:8.7",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let file = temp_session(&session);
    let (code, out, _) = lensfocus(&["estimate", file.path().to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    for line in out.lines().skip(1) {
        let f: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(((f + 26.9) / 26.9).abs() < 0.02, "{line}");
    }
}

#[test]
fn simulate_with_noise_is_deterministic() {
    let args = [
        "simulate",
        "--f",
        "17.2",
        "--u",
        "-9.1",
        "--O",
        "2",
        "--fc",
        "0.422",
        "--pitch",
        "1.4",
        "--positions",
        "12.1:27.4,64.4:29.5",
        "--noise",
        "0.5,0.05,0.05",
        "--seed",
        "3",
    ];
    let a = lensfocus(&args);
    let b = lensfocus(&args);
    assert_eq!(a.0, EXIT_OK);
    assert_eq!(a.1, b.1);
}

#[test]
fn exit_codes() {
    assert_eq!(lensfocus(&[]).0, EXIT_USAGE);
    assert_eq!(lensfocus(&["reproduce", "--table", "3"]).0, EXIT_USAGE);
    assert_eq!(
        lensfocus(&["estimate", "x.session", "--colour", "red"]).0,
        EXIT_USAGE
    );
    assert_eq!(lensfocus(&["--help"]).0, EXIT_OK);

    let (code, _, err) = lensfocus(&["estimate", "/nonexistent/file.session"]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.starts_with("error:"));

    let bad = temp_session("camera_model = x\n[observations]\n");
    let (code, _, err) = lensfocus(&["estimate", bad.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("line 2"), "{err}");

    // convex lens with the object beyond its focal point
    let (code, _, _) = lensfocus(&[
        "simulate",
        "--f",
        "10",
        "--u",
        "-20",
        "--O",
        "1",
        "--fc",
        "0.5",
        "--pitch",
        "1.5",
        "--positions",
        "5:10",
    ]);
    assert_eq!(code, EXIT_DEGENERATE);

    // declared convex, data says concave
    let text = std::fs::read_to_string(data("table1.session"))
        .unwrap()
        .replace("concave", "convex");
    let file = temp_session(&text);
    assert_eq!(
        lensfocus(&["estimate", file.path().to_str().unwrap()]).0,
        EXIT_DEGENERATE
    );
}

#[test]
fn uncertainty_output_shape() {
    let (code, out, _) = lensfocus(&[
        "uncertainty",
        &data("table2.session"),
        "--trials",
        "200",
        "--seed",
        "4",
        "--noise",
        "0,0,0",
    ]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2 + 10 + 1);
    // zero noise: every row's spread vanishes
    for l in &lines[2..12] {
        let cols: Vec<&str> = l.split_whitespace().collect();
        assert_eq!(cols[3], "0.0000", "{l}");
        assert_eq!(cols[1], cols[2], "{l}");
    }
}
