//! Synthetic meme corpora on disk: JSON splits plus PPM images.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use memefuse_core::features::{netpbm, ImageMatrix};
use memefuse_core::nn::Rng;
use memefuse_core::LabelVocabulary;
use serde_json::{json, Value};

pub const CLUSTERS: usize = 5;

const CLUSTER_WORDS: [&str; CLUSTERS] = [
    "traitor corrupt liar",
    "freedom patriot flag",
    "fear invasion danger",
    "hero great leader",
    "fake news media",
];

const CLUSTER_COLOURS: [[u8; 3]; CLUSTERS] = [
    [220, 40, 40],
    [40, 200, 60],
    [40, 60, 220],
    [230, 220, 40],
    [150, 40, 200],
];

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_memefuse"))
}

pub fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn memefuse")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn assert_ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), stderr(o));
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

/// Labels of record `j`: its cluster and the cluster offset by `CLUSTERS`.
pub fn record_labels(j: usize) -> Vec<String> {
    let vocab = LabelVocabulary::canonical();
    let k = j % CLUSTERS;
    vec![
        vocab.name(k).unwrap().to_string(),
        vocab.name(k + CLUSTERS).unwrap().to_string(),
    ]
}

fn image(j: usize, rng: &mut Rng) -> ImageMatrix {
    let c = CLUSTER_COLOURS[j % CLUSTERS];
    let (h, w) = (24 + j % 3 * 4, 32);
    let noise: Vec<i32> = (0..h * w * 3).map(|_| rng.below(41) as i32 - 20).collect();
    ImageMatrix::from_fn(h, w, 3, |y, x, ch| {
        let ramp = ((x + y) * 2) as i32;
        (i32::from(c[ch]) + ramp / 4 + noise[(y * w + x) * 3 + ch]).clamp(0, 255) as u8
    })
    .unwrap()
}

/// Writes `n` records starting at index `start` to `<dir>/<name>.json` with
/// images in `<dir>/images`.
pub fn write_split(dir: &Path, name: &str, start: usize, n: usize, seed: u64) -> PathBuf {
    let img_dir = dir.join("images");
    std::fs::create_dir_all(&img_dir).unwrap();
    let mut rng = Rng::new(seed ^ start as u64);
    let records: Vec<Value> = (start..start + n)
        .map(|j| {
            let file = format!("meme_{j:03}.ppm");
            std::fs::write(img_dir.join(&file), netpbm::encode(&image(j, &mut rng))).unwrap();
            json!({
                "id": format!("m{j:03}"),
                "text": format!("{} Nooooo!!! YOLO #{j} https://t.co/x{j}", CLUSTER_WORDS[j % CLUSTERS].to_uppercase()),
                "image": file,
                "labels": record_labels(j),
            })
        })
        .collect();
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&records).unwrap()).unwrap();
    path
}

/// A run config over `train`, `dev` and `test` splits in `dir`, with
/// `training` merged over small defaults.
pub fn write_config(dir: &Path, training: Value) -> PathBuf {
    let split = |s: &str| json!({"dataset": format!("{s}.clean.json"), "archive": format!("{s}.mfa")});
    let mut t = json!({"topology": "mfas", "epochs": 12, "batch_size": 8, "patience": null, "seed": 7});
    for (k, v) in training.as_object().unwrap() {
        t[k] = v.clone();
    }
    let cfg = json!({
        "version": 1,
        "features": {"text": {"dim": 256}},
        "data": {"train": split("train"), "dev": split("dev"), "test": split("test")},
        "output_dir": "out",
        "training": t,
    });
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

/// Raw splits of 30/10/10 records, preprocessed and featurized through the
/// binary. Returns the config path.
pub fn desk_corpus(dir: &Path, training: Value) -> PathBuf {
    let cfg = write_config(dir, training);
    for (name, start, n) in [("train", 0, 30), ("dev", 30, 10), ("test", 40, 10)] {
        let raw = write_split(dir, name, start, n, 11);
        let clean = dir.join(format!("{name}.clean.json"));
        assert_ok(&run(&[
            "preprocess",
            "--dataset",
            p(&raw),
            "--config",
            p(&cfg),
            "--out",
            p(&clean),
        ]));
        let archive = dir.join(format!("{name}.mfa"));
        assert_ok(&run(&[
            "featurize",
            "--dataset",
            p(&clean),
            "--images-dir",
            p(&dir.join("images")),
            "--config",
            p(&cfg),
            "--out-archive",
            p(&archive),
        ]));
    }
    cfg
}
