use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn onet(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_onet"));
    cmd.args(args);
    match out {
        Some(dir) => cmd.env("ONET_OUT", dir),
        None => cmd.env_remove("ONET_OUT"),
    };
    cmd.output().expect("spawn onet")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

#[test]
fn list_names_every_experiment() {
    let out = onet(&["list"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "spectral-rate",
        "lipschitz-P",
        "pu-properties",
        "trunk-exactness",
        "local-approx-rate",
        "branch-depth-study",
        "gap-vs-M",
        "gap-vs-P",
        "end-to-end-poisson",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "experiment = \"spectral-rate\"\nbogus_key = 3\n",
        "experiment = \"no-such-experiment\"\n",
        "experiment = \"spectral-rate\"\nthis line has no equals sign\n",
        "experiment = \"spectral-rate\"\nsmoothness = -1.0\n",
        "smoothness = 4.0\n",
    ];
    for (i, text) in cases.iter().enumerate() {
        let path = write_config(dir.path(), &format!("c{i}.conf"), text);
        let out = onet(&["run", &path], Some(&dir.path().join("out")));
        assert_eq!(out.status.code(), Some(2), "case {i}: {text}");
    }
    let missing = dir.path().join("absent.conf").display().to_string();
    assert_eq!(onet(&["run", &missing], None).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "tight.conf",
        "experiment = \"spectral-rate\"\nsmoothness = 4.0\ns_prime = 2.0\ntolerance = 1e-6\n",
    );
    let out = onet(&["run", &path], Some(&dir.path().join("out")));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn onet_out_overrides_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "lip.conf",
        "experiment = \"lipschitz-P\"\noutput_dir = \"ignored\"\nsvg = true\n",
    );
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    assert!(onet(&["run", &path], Some(&first)).status.success());
    assert!(onet(&["run", &path], Some(&second)).status.success());
    assert!(!dir.path().join("ignored").exists());
    for file in ["lipschitz_p.csv", "checks.csv", "lipschitz_p.svg"] {
        assert_eq!(
            digest(&first.join(file)),
            digest(&second.join(file)),
            "{file}"
        );
    }
}

#[test]
fn training_run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "e2e.conf",
        "experiment = \"end-to-end-poisson\"\nseeds = [3]\nsteps = 50\nheld_out = 2\nquad_res = 16\n",
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    onet(&["run", &path], Some(&a));
    onet(&["run", &path], Some(&b));
    for file in ["end_to_end.csv", "trace_seed3.csv", "model_seed3.txt"] {
        assert_eq!(digest(&a.join(file)), digest(&b.join(file)), "{file}");
    }
}

#[test]
fn check_suite_passes() {
    let out = onet(&["check"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(!text.contains("FAIL"));
}
