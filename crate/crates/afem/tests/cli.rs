use std::path::Path;
use std::process::{Command, Output};

use afem::formats::{read_levels, read_mesh, LevelRow};
use afem::rates::{fit_rates, Quantity, Window};

fn afem(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afem")).args(args).current_dir(dir).output().expect("binary runs")
}

fn levels(path: &Path) -> Vec<LevelRow> {
    read_levels(std::fs::File::open(path).unwrap()).unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_owned()
}

#[test]
fn example1_adaptive_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = afem(
        &[
            "run",
            "--problem",
            "example1",
            "--mode",
            "adaptive",
            "--theta",
            "0.8",
            "--max-elements",
            "4000",
            "--out",
            "l.csv",
            "--dump-mesh",
            "m.txt",
            "--dump-indicators",
            "i.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("l.csv");
    assert_eq!(header(&csv), "level,N,rho,rho_tilde,apx,J,eps,pdas_iters,wall_ms");
    let rows = levels(&csv);
    let last = rows.last().unwrap();
    assert!((4000..=16000).contains(&last.n), "final N = {}", last.n);
    assert!(rows.windows(2).all(|w| w[1].n > w[0].n && w[1].level == w[0].level + 1));
    for r in &rows {
        let eps = r.eps.unwrap();
        assert!([r.rho, r.rho_tilde, r.apx, r.j, eps, r.wall_ms].iter().all(|v| v.is_finite()));
        assert!(eps >= 0.0 && r.rho_tilde <= r.rho);
    }

    let mesh = read_mesh(std::io::BufReader::new(std::fs::File::open(dir.path().join("m.txt")).unwrap())).unwrap();
    assert_eq!(mesh.num_triangles(), last.n);
    assert!(mesh.is_conforming());
    let ind = std::fs::read_to_string(dir.path().join("i.csv")).unwrap();
    let mut lines = ind.lines();
    assert_eq!(lines.next(), Some("edge_id,kind,eta2,osc2,apx2"));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), mesh.num_edges());
    let total: f64 = body
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert!(f[1] == "interior" || f[1] == "boundary");
            f[2..].iter().map(|v| v.parse::<f64>().unwrap()).sum::<f64>()
        })
        .sum();
    assert!((total.sqrt() - last.rho).abs() < 1e-9 * last.rho);

    let fit = fit_rates(&csv, Quantity::SqrtEps, Window::Last(5)).unwrap();
    assert!(fit.slope < 0.0 && fit.points == 5);
}

#[test]
fn uniform_run_quadruples() {
    let dir = tempfile::tempdir().unwrap();
    let out = afem(
        &["run", "--problem", "example1", "--mode", "uniform", "--max-elements", "4000", "--out", "u.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let rows = levels(&dir.path().join("u.csv"));
    assert!(rows.windows(2).all(|w| w[1].n == 4 * w[0].n));
    assert_eq!(rows.last().unwrap().n, 8192);
}

#[test]
fn repeated_runs_agree() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = afem(
            &["run", "--problem", "example1", "--theta", "0.5", "--max-elements", "1000", "--out", name],
            dir.path(),
        );
        assert!(out.status.success());
    }
    let strip = |rows: Vec<LevelRow>| rows.into_iter().map(|r| LevelRow { wall_ms: 0.0, ..r }).collect::<Vec<_>>();
    assert_eq!(strip(levels(&dir.path().join("a.csv"))), strip(levels(&dir.path().join("b.csv"))));
    let fa = fit_rates(&dir.path().join("a.csv"), Quantity::Rho, Window::All).unwrap();
    let fb = fit_rates(&dir.path().join("b.csv"), Quantity::Rho, Window::All).unwrap();
    assert_eq!(fa, fb);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = afem(&["run", "--problem", "example1", "--theta", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));
    assert_eq!(afem(&["run", "--problem", "example9"], dir.path()).status.code(), Some(1));
    assert_eq!(afem(&["run", "--problem", "example1", "--bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(afem(&["run"], dir.path()).status.code(), Some(1));
    assert_eq!(afem(&["run", "--problem", "custom:missing.toml"], dir.path()).status.code(), Some(1));
    let help = afem(&["--help"], dir.path());
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("run"));
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "problem = \"example1\"\nmode = \"adaptive\"\ntheta = 0.3\nmax_elements = 300\nmax_level = 3\nout = \"c.csv\"\n\
         dump_mesh = \"c.mesh\"\ndump_indicators = \"c.ind\"\nreference_elements = 0\nseed = 4\n",
    )
    .unwrap();
    let out = afem(&["run", "--config", "run.toml"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(levels(&dir.path().join("c.csv")).len(), 4);
    assert!(dir.path().join("c.mesh").exists() && dir.path().join("c.ind").exists());

    let out = afem(&["run", "--config", "run.toml", "--max-level", "1", "--out", "d.csv"], dir.path());
    assert!(out.status.success());
    assert_eq!(levels(&dir.path().join("d.csv")).len(), 2);

    std::fs::write(dir.path().join("bad.toml"), "problem = \"example1\"\nthetta = 0.3\n").unwrap();
    assert_eq!(afem(&["run", "--config", "bad.toml"], dir.path()).status.code(), Some(1));
}

const ZERO_DATA: &str = "[domain]\nshape = \"square\"\nhalf_width = 1.0\n[f]\ntype = \"constant\"\nvalue = 0.0\n[g]\ntype = \"constant\"\nvalue = 0.0\n";

#[test]
fn custom_problems() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("zero.toml"), ZERO_DATA).unwrap();
    let out =
        afem(&["run", "--problem", "custom:zero.toml", "--reference-elements", "0", "--out", "z.csv"], dir.path());
    assert!(out.status.success());
    let csv = dir.path().join("z.csv");
    assert_eq!(header(&csv), "level,N,rho,rho_tilde,apx,J,pdas_iters,wall_ms");
    let rows = levels(&csv);
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].rho, rows[0].j), (0.0, 0.0));

    let bump = r#"
        [domain]
        shape = "square"
        half_width = 1.0
        [f]
        type = "constant"
        value = -4.0
        [g]
        type = "constant"
        value = 0.0
        [chi]
        type = "piecewise"
        variable = "x"
        threshold = 0.0
        below = { type = "constant", value = -1.0 }
        above = { type = "sinusoidal", amplitude = -0.5, kx = 3.14159265358979, offset = -1.0 }
    "#;
    std::fs::write(dir.path().join("bump.toml"), bump).unwrap();
    let out = afem(
        &[
            "run",
            "--problem",
            "custom:bump.toml",
            "--reference-elements",
            "2000",
            "--max-elements",
            "500",
            "--out",
            "b.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("b.csv");
    assert!(header(&csv).contains(",eps,"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reference energy"));
    assert!(levels(&csv).iter().all(|r| r.eps.unwrap().is_finite()));
}

#[test]
fn inadmissible_and_non_finite_data() {
    let dir = tempfile::tempdir().unwrap();
    let above = ZERO_DATA.to_owned() + "[chi]\ntype = \"constant\"\nvalue = 1.0\n";
    std::fs::write(dir.path().join("above.toml"), above).unwrap();
    let out = afem(&["run", "--problem", "custom:above.toml", "--reference-elements", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let singular = ZERO_DATA
        .replace("half_width = 1.0", "center = [1.0, 1.0]\nhalf_width = 1.0")
        .replace("[g]\ntype = \"constant\"\nvalue = 0.0", "[g]\ntype = \"radial\"\nterms = [[1.0, -1.0]]");
    std::fs::write(dir.path().join("singular.toml"), singular).unwrap();
    let out =
        afem(&["run", "--problem", "custom:singular.toml", "--reference-elements", "0", "--out", "s.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
    assert!(dir.path().join("s.csv").exists());
}

#[test]
fn fit_and_check_commands() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("level,N,rho,rho_tilde,apx,J,pdas_iters,wall_ms\n");
    for l in 0..6u32 {
        let n = 2.0 * 4f64.powi(l as i32);
        text += &format!("{l},{n},{},1,1,0,1,0\n", 3.0 * n.powf(-0.75));
    }
    std::fs::write(dir.path().join("f.csv"), text).unwrap();
    let out = afem(&["fit", "--csv", "f.csv", "--quantity", "rho", "--window", "1:"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    let slope: f64 = stdout.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((slope + 0.75).abs() < 1e-12, "{stdout}");
    assert!(stdout.ends_with("points 5\n"));
    assert_eq!(afem(&["fit", "--csv", "f.csv", "--quantity", "eps"], dir.path()).status.code(), Some(1));
    assert_eq!(
        afem(&["fit", "--csv", "f.csv", "--window", "last:3", "--quantity", "rho"], dir.path()).status.code(),
        Some(1)
    );

    let out = afem(&["check", "--seed", "5", "--cases", "3", "--max-nodes", "80"], dir.path());
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 4);
}
