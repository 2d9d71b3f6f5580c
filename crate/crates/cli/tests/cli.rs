use std::path::Path;
use std::process::Command;

fn vvp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_vvp")).args(args).output().unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn two_level_study_writes_a_three_line_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = vvp(&["convergence", "--levels", "2", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("convergence-taylor-hood-dg1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "dof,h,e_u,r_u,e_w,r_w,e_p,r_p");
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&first[..2], ["84", "7.07e-1"]);
    assert!(first[3].is_empty() && first[5].is_empty() && first[7].is_empty(), "{}", lines[1]);
    // Shape: 284,3.54e-1,2.49e-1,1.772,1.41e-1,1.948,4.64e-2,2.326
    let f: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(f[0], "284");
    assert_eq!(f[1], "3.54e-1");
    for k in [2, 4, 6] {
        let (mant, exp) = f[k].split_once('e').unwrap();
        assert_eq!(mant.len(), 4, "{}", f[k]);
        exp.parse::<i32>().unwrap();
    }
    for k in [3, 5, 7] {
        assert_eq!(f[k].split_once('.').unwrap().1.len(), 3, "{}", f[k]);
    }
    assert!(!csv.contains('\r'));
}

#[test]
fn repeated_runs_give_identical_tables() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = vvp(&["--family", "mini", "--levels", "3", "--out", &out_arg(d.path())]);
        assert!(o.status.success());
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("convergence-mini-dg1.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn invalid_kappa1_exits_with_validation_code() {
    let o = vvp(&["convergence", "--kappa1", "0.08", "--nu0", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa1"));
    assert_eq!(vvp(&["--levels", "x"]).status.code(), Some(2));
}

#[test]
fn unconverged_study_is_flagged_and_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = vvp(&["--levels", "2", "--method", "picard", "--max-iters", "1", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    let csv = std::fs::read_to_string(dir.path().join("convergence-taylor-hood-dg1.csv")).unwrap();
    assert_eq!(csv.lines().last().unwrap(), "# partial: level 0 non-converged");
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = vvp(&["--levels", "2", "--out", &out_arg(&blocker)]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("res");
    std::fs::write(&cfg, format!("# coarse study\nfamily = bernardi-raugel\nvorticity = dg0\nlevels = 4\nout = {}\n", out.display()))
        .unwrap();
    let o = vvp(&["--config", cfg.to_str().unwrap(), "--levels", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("convergence-bernardi-raugel-dg0.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    std::fs::write(&cfg, "shape = round\n").unwrap();
    assert_eq!(vvp(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(vvp(&["--config", dir.path().join("missing").to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn small_cavity_writes_a_vtk_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = vvp(&["cavity", "--nx", "16", "--ny", "8", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let vtk = std::fs::read_to_string(dir.path().join("cavity.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(vtk.contains("POINT_DATA 153\n") && vtk.contains("VECTORS velocity double"));
    assert!(vtk.contains("SCALARS vorticity double 1") && vtk.contains("SCALARS pressure double 1"));
}

#[test]
fn diagnostics_print_the_advisory_report() {
    let o = vvp(&["diagnostics"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("alpha     = "));
    assert!(text.contains("advisory"));
}
