//! Behavior tests for the command-line surface: exit codes, file
//! outputs, report records and the bench table.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn stackfuse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stackfuse"))
        .args(args)
        .output()
        .expect("failed to spawn stackfuse")
}

fn write_gradient_ppm(path: &Path, width: usize, height: usize) {
    let mut body = format!("P6\n{width} {height}\n255\n").into_bytes();
    for y in 0..height {
        for x in 0..width {
            body.push((255 * x / (width - 1).max(1)) as u8);
            body.push((255 * y / (height - 1).max(1)) as u8);
            body.push((128 + 100 * ((x + y) % 2)) as u8);
        }
    }
    std::fs::write(path, body).unwrap();
}

/// Flat-scanline RGBE file with a bright patch, for synth tests.
fn write_hdr(path: &Path, width: usize, height: usize) {
    let mut data =
        format!("#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y {height} +X {width}\n").into_bytes();
    for y in 0..height {
        for x in 0..width {
            let bright = x > width / 2 && y < height / 2;
            // e = 128 decodes mantissa m as m / 256.
            let (m, e) = if bright { (200u8, 133u8) } else { (120u8, 127u8) };
            data.extend_from_slice(&[m, m / 2, m / 3 + 1, e]);
        }
    }
    std::fs::write(path, data).unwrap();
}

#[test]
fn enhance_approach_a_without_ev_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ppm");
    write_gradient_ppm(&input, 8, 8);
    let out = stackfuse(&[
        "enhance",
        "-i",
        input.to_str().unwrap(),
        "-o",
        dir.path().join("out.png").to_str().unwrap(),
        "--approach",
        "a",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--ev"), "stderr: {stderr}");
}

#[test]
fn enhance_unreadable_input_is_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = stackfuse(&[
        "enhance",
        "-i",
        dir.path().join("missing.ppm").to_str().unwrap(),
        "-o",
        dir.path().join("out.png").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn enhance_writes_output_and_intermediates() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ppm");
    write_gradient_ppm(&input, 16, 12);
    let output = dir.path().join("fused.png");
    let out = stackfuse(&[
        "enhance",
        "-i",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
        "--approach",
        "a",
        "--ev",
        "0",
        "--emit-intermediates",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(output.exists());
    for name in ["fused_lc.png", "fused_ev-1.0.png", "fused_ev+0.0.png", "fused_ev+1.0.png"] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
}

#[test]
fn enhance_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ppm");
    write_gradient_ppm(&input, 8, 8);
    let config = dir.path().join("run.conf");
    std::fs::write(
        &config,
        format!(
            "input = {}\noutput = {}\napproach = a\n# no ev here\n",
            input.display(),
            dir.path().join("cfg_out.png").display()
        ),
    )
    .unwrap();

    // File alone: approach a without ev is a usage error.
    let out = stackfuse(&["enhance", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Flag overrides the file's approach.
    let out = stackfuse(&[
        "enhance",
        "--config",
        config.to_str().unwrap(),
        "--approach",
        "b",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("cfg_out.png").exists());
}

#[test]
fn enhance_intermediates_match_library_composition() {
    // The emitted pseudo exposure files must agree with composing the
    // library operations directly, up to 8-bit quantization.
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ppm");
    write_gradient_ppm(&input, 12, 10);
    let output = dir.path().join("out.png");
    let run = stackfuse(&[
        "enhance",
        "-i",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
        "--approach",
        "b",
        "--emit-intermediates",
    ]);
    assert!(run.status.success());

    let img = stackfuse::io::load_image_auto(&input).unwrap();
    let config = stackfuse::pipeline::PipelineConfig::default();
    let registry = stackfuse::fusion::FusionRegistry::with_builtins();
    let out = stackfuse::pipeline::run(&img, &config, &registry).unwrap();

    for member in out.pseudo_exposures.members() {
        let path = dir.path().join(format!("out_ev{:+.1}.png", member.ev));
        let from_cli = stackfuse::io::load_image_auto(&path).unwrap();
        for (a, b) in from_cli.pixels().iter().zip(member.image.pixels()) {
            for k in 0..3 {
                assert!(
                    (a[k] - b[k].clamp(0.0, 1.0)).abs() <= 1.0 / 510.0,
                    "ev {:+.1}: {} vs {}",
                    member.ev,
                    a[k],
                    b[k]
                );
            }
        }
    }
}

#[test]
fn synth_writes_members_with_increasing_brightness() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("scene.hdr");
    write_hdr(&input, 24, 16);
    let stem = dir.path().join("stack");
    let out = stackfuse(&[
        "synth",
        "-i",
        input.to_str().unwrap(),
        "-o",
        stem.to_str().unwrap(),
        "--evs",
        "-1,0,1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut means = Vec::new();
    for ev in ["-1.0", "+0.0", "+1.0"] {
        let path = PathBuf::from(format!("{}_ev{ev}.png", stem.display()));
        assert!(path.exists(), "missing member for EV {ev}");
        let img = stackfuse::io::load_image_auto(&path).unwrap();
        let lum = stackfuse::relative_luminance(&img);
        means.push(lum.values().iter().sum::<f64>() / lum.values().len() as f64);
    }
    assert!(means[0] < means[1] && means[1] < means[2], "{means:?}");
}

/// RGBE fixture with little dynamic range, so the 0 EV member clips
/// nothing and the gray anchor survives the clamp.
fn write_hdr_low_range(path: &Path, width: usize, height: usize) {
    let mut data =
        format!("#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y {height} +X {width}\n").into_bytes();
    for y in 0..height {
        for x in 0..width {
            let bright = x > width / 2 && y < height / 2;
            let (m, e) = if bright { (180u8, 128u8) } else { (120u8, 127u8) };
            data.extend_from_slice(&[m, m / 2, m / 3 + 1, e]);
        }
    }
    std::fs::write(path, data).unwrap();
}

#[test]
fn synth_zero_ev_hits_the_gray_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("scene.hdr");
    write_hdr_low_range(&input, 16, 16);
    let stem = dir.path().join("one");
    let out = stackfuse(&[
        "synth",
        "-i",
        input.to_str().unwrap(),
        "-o",
        stem.to_str().unwrap(),
        "--evs",
        "0",
    ]);
    assert!(out.status.success());
    let img = stackfuse::io::load_image_auto(&PathBuf::from(format!(
        "{}_ev+0.0.png",
        stem.display()
    )))
    .unwrap();
    let lum = stackfuse::relative_luminance(&img);
    let mean = stackfuse::exposure::geometric_mean(&lum, 1e-6);
    // Quantization to 8 bits shifts the anchor slightly.
    assert!((mean - 0.18).abs() < 1e-2, "geometric mean {mean}");
}

#[test]
fn synth_rejects_non_hdr_and_all_black() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("in.ppm");
    write_gradient_ppm(&ppm, 4, 4);
    let out = stackfuse(&[
        "synth",
        "-i",
        ppm.to_str().unwrap(),
        "-o",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    // All-black HDR: degenerate input.
    let black = dir.path().join("black.hdr");
    let mut data = b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y 2 +X 2\n".to_vec();
    data.extend_from_slice(&[0u8; 16]);
    std::fs::write(&black, data).unwrap();
    let out = stackfuse(&[
        "synth",
        "-i",
        black.to_str().unwrap(),
        "-o",
        dir.path().join("y").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn metrics_identical_pair_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ppm");
    write_gradient_ppm(&input, 8, 8);
    let out = stackfuse(&[
        "metrics",
        "--which",
        "ciede2000",
        input.to_str().unwrap(),
        input.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("mean_de2000=0.00000"), "stdout: {stdout}");
}

#[test]
fn metrics_mixed_sizes_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ppm");
    let b = dir.path().join("b.ppm");
    write_gradient_ppm(&a, 8, 8);
    write_gradient_ppm(&b, 9, 8);
    let out = stackfuse(&[
        "metrics",
        "--which",
        "ciede2000",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn metrics_missing_second_image_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ppm");
    write_gradient_ppm(&a, 8, 8);
    let out = stackfuse(&["metrics", "--which", "ciede2000", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn metrics_naturalness_single_image() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ppm");
    write_gradient_ppm(&a, 16, 16);
    let out = stackfuse(&["metrics", "--which", "naturalness", a.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("statistical_naturalness="),
        "stdout: {stdout}"
    );
}

#[test]
fn bench_empty_manifest_is_exit_0_with_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("empty.manifest");
    std::fs::write(&manifest, "# nothing to do\n").unwrap();
    let out = stackfuse(&["bench", "--manifest", manifest.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn bench_missing_scene_file_is_recorded_and_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("bad.manifest");
    std::fs::write(&manifest, "scene=gone hdr=/nonexistent.hdr methods=input\n").unwrap();
    let table = dir.path().join("table.tsv");
    let out = stackfuse(&[
        "bench",
        "--manifest",
        manifest.to_str().unwrap(),
        "-o",
        table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.contains("gone\tmean_de2000\terror"), "table:\n{text}");
}

#[test]
fn bench_hdr_scene_produces_method_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let hdr = dir.path().join("scene.hdr");
    write_hdr(&hdr, 32, 24);
    let manifest = dir.path().join("run.manifest");
    std::fs::write(
        &manifest,
        format!("scene=tiny hdr={} methods=input,a,b\n", hdr.display()),
    )
    .unwrap();
    let out = stackfuse(&["bench", "--manifest", manifest.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let de_row: Vec<&str> = stdout
        .lines()
        .find(|l| l.starts_with("tiny\tmean_de2000"))
        .expect("missing de2000 row")
        .split('\t')
        .collect();
    // Columns: scene, metric, input, a, b.
    let de_input: f64 = de_row[2].parse().unwrap();
    let de_a: f64 = de_row[3].parse().unwrap();
    let de_b: f64 = de_row[4].parse().unwrap();
    assert_eq!(de_input, 0.0);
    assert!(de_a <= de_b, "expected A <= B, got {de_a} vs {de_b}");
}
