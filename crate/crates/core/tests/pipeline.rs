//! Records through normalization, featurization, training and scoring using
//! only the public API.

use std::collections::BTreeMap;

use memefuse_core::dataset::{binarize, parse_dataset};
use memefuse_core::eval::{comparison_report, micro_prf};
use memefuse_core::features::{
    baseline_image_features, FeatureArchive, FeatureBundle, HashedNgramConfig, HashedVectorizer, ImageMatrix,
};
use memefuse_core::fusion::train::{evaluate, examples_from_maps};
use memefuse_core::fusion::{checkpoint, train, Architecture, FusionModel, Topology, TrainConfig};
use memefuse_core::text::{preprocess, PreprocessConfig, TextResources};
use memefuse_core::LabelVocabulary;

const TOPICS: [(&str, &str, [u8; 3]); 3] = [
    ("Smears", "corrupt liar traitor", [200, 30, 30]),
    ("Loaded Language", "disgusting evil monsters", [30, 200, 30]),
    ("Slogans", "make america great", [30, 30, 200]),
];

fn dataset_json(n: usize) -> String {
    let records: Vec<serde_json::Value> = (0..n)
        .map(|j| {
            let (label, words, _) = TOPICS[j % 3];
            serde_json::json!({
                "id": format!("r{j}"),
                "text": format!("{} Sooooo!!! #{j} http://t.co/{j}", words.to_uppercase()),
                "image": format!("{j}.ppm"),
                "labels": [label],
            })
        })
        .collect();
    serde_json::to_string(&records).unwrap()
}

fn image_for(j: usize) -> ImageMatrix {
    let c = TOPICS[j % 3].2;
    ImageMatrix::from_fn(16, 16, 3, |y, x, ch| {
        c[ch].wrapping_add(((x * 7 + y * 3 + j) % 23) as u8)
    })
    .unwrap()
}

#[test]
fn records_to_comparison_report() {
    let vocab = LabelVocabulary::canonical();
    let records = parse_dataset(&dataset_json(36), &vocab).unwrap();
    let res = TextResources::shipped();
    let cleaned: Vec<String> = records
        .iter()
        .map(|r| preprocess(&r.text, &PreprocessConfig::default(), &res))
        .collect();
    assert_eq!(cleaned[0], "CORRUPT LIAR TRAITOR So <number>");

    let text_cfg = HashedNgramConfig {
        dim: 64,
        ..HashedNgramConfig::default()
    };
    let vectorizer = HashedVectorizer::fit(text_cfg, cleaned.iter().map(String::as_str)).unwrap();
    let bundles: BTreeMap<String, FeatureBundle> = records
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let t = vectorizer.transform(&cleaned[j]).iter().map(|&v| v as f32).collect();
            let (h, i) = baseline_image_features(&image_for(j)).unwrap();
            (r.id.clone(), FeatureBundle::new(t, h, i).unwrap())
        })
        .collect();
    let archive = FeatureArchive::decode(&FeatureArchive::from_bundles(bundles).unwrap().encode().unwrap()).unwrap();
    let labels = records.iter().map(|r| (r.id.clone(), binarize(r))).collect();
    let examples = examples_from_maps(archive.bundles(), &labels).unwrap();

    let arch = Architecture {
        joint: 32,
        mfas_inner: 32,
        mfas_outer: 32,
        late_hidden: 16,
        head_hidden: vec![32, 16],
        dropout: 0.1,
    };
    let cfg = TrainConfig {
        lr: 1e-2,
        epochs: 60,
        batch_size: 6,
        patience: None,
        ..TrainConfig::default()
    };
    let mut results = BTreeMap::new();
    for t in Topology::ALL {
        let model = FusionModel::build(t, archive.dims(), arch.clone(), 3).unwrap();
        let out = train(model, &examples, None, &cfg).unwrap();
        let restored = checkpoint::decode(&checkpoint::encode(&out.model).unwrap()).unwrap();
        let (_, metrics) = evaluate(&restored, &examples, &cfg.loss, 0.5).unwrap();
        let preds: Vec<_> = examples
            .iter()
            .map(|e| restored.predict(&e.bundle, 0.5).unwrap())
            .collect();
        let golds: Vec<_> = examples.iter().map(|e| e.labels).collect();
        assert_eq!(micro_prf(&preds, &golds).unwrap(), metrics);
        assert!(metrics.micro_f1 >= 0.9, "{t}: {}", metrics.micro_f1);
        results.insert(t, metrics);
    }
    let report = comparison_report(results).unwrap();
    assert_eq!(report.rows().len(), 4);
    assert_eq!(report.to_text().lines().count(), 5);
}
