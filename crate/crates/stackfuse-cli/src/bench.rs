//! Batch evaluation over a scene manifest.
//!
//! Each manifest line describes one scene as whitespace-separated
//! `key=value` tokens (`#` starts a comment):
//!
//! ```text
//! scene=memorial hdr=images/memorial.hdr evs=-1,0,1 methods=input,mef,a,b
//! scene=estate stack=a.png;b.png;c.png input_index=1 methods=a,b
//! ```
//!
//! HDR scenes are mapped to an LDR stack anchored at middle gray; stack
//! scenes use the listed LDR files directly. The image at 0 EV (or
//! `input_index`) is the single input the enhancement methods see, and
//! the reference for CIEDE2000. All metric inputs are quantized to 8 bits
//! first, so the numbers match what saved files would produce.
//!
//! The result table is TSV: one `mean_de2000` and one `naturalness` row
//! per scene, one column per method, in manifest order. Scene failures
//! become `error` cells; the run continues and the exit code is nonzero.

use std::io::Write;
use std::path::PathBuf;

use crate::config::parse_ev_list;
use crate::CliError;
use stackfuse::exposure::{
    synth_exposure_stack, Approach, ExposureCompConfig, DEFAULT_EPSILON, DEFAULT_TARGET_EVS,
};
use stackfuse::fusion::FusionRegistry;
use stackfuse::image::{ExposureStack, RgbImage, StackMember};
use stackfuse::io::load_image_auto;
use stackfuse::metrics::{format_significant, mean_de2000, statistical_naturalness};
use stackfuse::pipeline::{self, PipelineConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Input,
    Mef,
    A,
    B,
}

impl Method {
    fn parse(tok: &str) -> Result<Method, String> {
        match tok {
            "input" => Ok(Method::Input),
            "mef" => Ok(Method::Mef),
            "a" => Ok(Method::A),
            "b" => Ok(Method::B),
            other => Err(format!(
                "unknown method '{other}' (expected input, mef, a or b)"
            )),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Method::Input => "input",
            Method::Mef => "mef",
            Method::A => "a",
            Method::B => "b",
        }
    }
}

#[derive(Debug)]
enum SceneSource {
    Hdr(PathBuf),
    Stack(Vec<PathBuf>),
}

#[derive(Debug)]
struct Scene {
    name: String,
    source: SceneSource,
    evs: Vec<f64>,
    input_index: Option<usize>,
    methods: Vec<Method>,
}

fn parse_manifest(text: &str) -> Result<Vec<Scene>, String> {
    let mut scenes = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut name = None;
        let mut hdr = None;
        let mut stack = None;
        let mut evs = None;
        let mut input_index = None;
        let mut methods = None;
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value tokens", lineno + 1))?;
            match key {
                "scene" => name = Some(value.to_string()),
                "hdr" => hdr = Some(PathBuf::from(value)),
                "stack" => {
                    stack = Some(value.split(';').map(PathBuf::from).collect::<Vec<_>>())
                }
                "evs" => evs = Some(parse_ev_list(value)?),
                "input_index" => {
                    input_index = Some(value.parse::<usize>().map_err(|e| {
                        format!("line {}: bad input_index: {e}", lineno + 1)
                    })?)
                }
                "methods" => {
                    methods = Some(
                        value
                            .split(',')
                            .map(Method::parse)
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                other => return Err(format!("line {}: unknown key '{other}'", lineno + 1)),
            }
        }
        let name =
            name.ok_or_else(|| format!("line {}: missing scene=<name>", lineno + 1))?;
        let source = match (hdr, stack) {
            (Some(path), None) => SceneSource::Hdr(path),
            (None, Some(paths)) if !paths.is_empty() => SceneSource::Stack(paths),
            (Some(_), Some(_)) => {
                return Err(format!(
                    "line {}: scene '{name}' sets both hdr= and stack=",
                    lineno + 1
                ))
            }
            _ => {
                return Err(format!(
                    "line {}: scene '{name}' needs hdr=<path> or stack=<p1;p2;...>",
                    lineno + 1
                ))
            }
        };
        scenes.push(Scene {
            name,
            source,
            evs: evs.unwrap_or_else(|| DEFAULT_TARGET_EVS.to_vec()),
            input_index,
            methods: methods
                .unwrap_or_else(|| vec![Method::Input, Method::Mef, Method::A, Method::B]),
        });
    }
    Ok(scenes)
}

/// Simulates the save/load quantization so metrics see 8-bit data.
fn quantized(img: &RgbImage) -> RgbImage {
    img.map(|c| (c.clamp(0.0, 1.0) * 255.0).round() / 255.0)
}

struct SceneResult {
    de2000: Vec<(Method, Result<f64, String>)>,
    naturalness: Vec<(Method, Result<f64, String>)>,
}

fn run_scene(scene: &Scene, registry: &FusionRegistry) -> Result<SceneResult, String> {
    // Assemble the LDR stack.
    let stack = match &scene.source {
        SceneSource::Hdr(path) => {
            let hdr = load_image_auto(path).map_err(|e| e.to_string())?;
            let stack = synth_exposure_stack(&hdr, &scene.evs, DEFAULT_EPSILON)
                .map_err(|e| e.to_string())?;
            ExposureStack::new(
                stack
                    .members()
                    .iter()
                    .map(|m| StackMember {
                        ev: m.ev,
                        image: quantized(&m.image),
                    })
                    .collect(),
            )
            .map_err(|e| e.to_string())?
        }
        SceneSource::Stack(paths) => {
            let members = paths
                .iter()
                .enumerate()
                .map(|(i, path)| {
                    let image = quantized(&load_image_auto(path).map_err(|e| e.to_string())?);
                    let ev = scene.evs.get(i).copied().unwrap_or(i as f64);
                    Ok(StackMember { ev, image })
                })
                .collect::<Result<Vec<_>, String>>()?;
            ExposureStack::new(members).map_err(|e| e.to_string())?
        }
    };

    // The single input image the enhancement methods work from.
    let input_index = scene.input_index.unwrap_or_else(|| {
        stack
            .members()
            .iter()
            .position(|m| m.ev == 0.0)
            .unwrap_or(stack.len() / 2)
    });
    let input = &stack
        .members()
        .get(input_index)
        .ok_or_else(|| format!("input_index {input_index} out of range"))?
        .image;

    let mut de2000_cells = Vec::new();
    let mut naturalness_cells = Vec::new();
    for &method in &scene.methods {
        let produced: Result<RgbImage, String> = match method {
            Method::Input => Ok(input.clone()),
            Method::Mef => registry
                .fuse("mertens", &stack)
                .map(|img| quantized(&img))
                .map_err(|e| e.to_string()),
            Method::A | Method::B => {
                let config = PipelineConfig {
                    exposure: ExposureCompConfig {
                        approach: if method == Method::A {
                            Approach::A
                        } else {
                            Approach::B
                        },
                        known_ev: if method == Method::A { Some(0.0) } else { None },
                        target_evs: scene.evs.clone(),
                        ..Default::default()
                    },
                    ..Default::default()
                };
                pipeline::run(input, &config, registry)
                    .map(|out| quantized(&out.fused))
                    .map_err(|e| e.to_string())
            }
        };
        match produced {
            Ok(result) => {
                de2000_cells.push((
                    method,
                    mean_de2000(&result, input).map_err(|e| e.to_string()),
                ));
                naturalness_cells.push((method, Ok(statistical_naturalness(&result))));
            }
            Err(e) => {
                de2000_cells.push((method, Err(e.clone())));
                naturalness_cells.push((method, Err(e)));
            }
        }
    }
    Ok(SceneResult {
        de2000: de2000_cells,
        naturalness: naturalness_cells,
    })
}

pub fn cmd_bench(manifest: PathBuf, output: Option<PathBuf>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&manifest)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", manifest.display())))?;
    let scenes = parse_manifest(&text).map_err(CliError::Usage)?;

    // Column order: methods in order of first appearance.
    let mut columns: Vec<Method> = Vec::new();
    for scene in &scenes {
        for &m in &scene.methods {
            if !columns.contains(&m) {
                columns.push(m);
            }
        }
    }

    let registry = FusionRegistry::with_builtins();
    let mut table = String::new();
    let mut failures = 0usize;
    if !scenes.is_empty() {
        table.push_str("scene\tmetric");
        for m in &columns {
            table.push('\t');
            table.push_str(m.name());
        }
        table.push('\n');
    }

    for scene in &scenes {
        match run_scene(scene, &registry) {
            Ok(result) => {
                for (metric, cells) in [
                    ("mean_de2000", &result.de2000),
                    ("naturalness", &result.naturalness),
                ] {
                    table.push_str(&scene.name);
                    table.push('\t');
                    table.push_str(metric);
                    for column in &columns {
                        table.push('\t');
                        match cells.iter().find(|(m, _)| m == column) {
                            Some((_, Ok(v))) => table.push_str(&format_significant(*v, 6)),
                            Some((_, Err(e))) => {
                                failures += 1;
                                eprintln!("scene {} {}: {e}", scene.name, column.name());
                                table.push_str("error");
                            }
                            None => table.push('-'),
                        }
                    }
                    table.push('\n');
                }
            }
            Err(e) => {
                failures += 1;
                eprintln!("scene {}: {e}", scene.name);
                for metric in ["mean_de2000", "naturalness"] {
                    table.push_str(&scene.name);
                    table.push('\t');
                    table.push_str(metric);
                    for _ in &columns {
                        table.push_str("\terror");
                    }
                    table.push('\n');
                }
            }
        }
    }

    match &output {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
            file.write_all(table.as_bytes())
                .map_err(|e| CliError::runtime(e.to_string()))?;
        }
        None => print!("{table}"),
    }

    if failures > 0 {
        Err(CliError::runtime(format!(
            "{failures} scene evaluation(s) failed"
        )))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lines_parse() {
        let scenes = parse_manifest(
            "# header comment\nscene=s1 hdr=a.hdr evs=-1,0,1 methods=input,a\n\nscene=s2 stack=x.png;y.png input_index=0\n",
        )
        .unwrap();
        assert_eq!(scenes.len(), 2);
        assert_eq!(scenes[0].name, "s1");
        assert!(matches!(scenes[0].source, SceneSource::Hdr(_)));
        assert_eq!(scenes[0].methods.len(), 2);
        assert_eq!(scenes[1].methods.len(), 4);
        assert_eq!(scenes[1].input_index, Some(0));
    }

    #[test]
    fn manifest_rejects_conflicting_sources() {
        assert!(parse_manifest("scene=s hdr=a.hdr stack=b.png\n").is_err());
        assert!(parse_manifest("scene=s\n").is_err());
        assert!(parse_manifest("scene=s hdr=a.hdr methods=zzz\n").is_err());
    }

    #[test]
    fn empty_manifest_is_empty() {
        assert!(parse_manifest("\n# nothing here\n").unwrap().is_empty());
    }
}
