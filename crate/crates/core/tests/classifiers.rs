use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use radiomics_crbm::classifiers::{
    lr_fit, lr_loss_and_gradient, rf_fit, rf_predict_proba, svm_decision, svm_fit_with_history, ClassifierConfig,
    FittedClassifier, LrConfig, LrModel, RfConfig, SvmConfig,
};
use radiomics_crbm::evaluation::auc_mann_whitney;
use radiomics_crbm::rng::derived_rng;
use radiomics_crbm::FeatureMatrix;

fn clouds(n: usize, sep: f64, seed: u64) -> (FeatureMatrix, Vec<u8>) {
    let mut rng = derived_rng(seed, "clouds", 0);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&l| {
            let s = if l == 1 { sep } else { -sep };
            vec![s + noise.sample(&mut rng), 0.5 * s + noise.sample(&mut rng), noise.sample(&mut rng)]
        })
        .collect();
    (FeatureMatrix::from_unnamed_rows(&rows).unwrap(), labels)
}

#[test]
fn lr_gradient_matches_finite_differences() {
    let (x, labels) = clouds(40, 0.5, 1);
    let mut rng = derived_rng(2, "lr-point", 0);
    let mut model = LrModel::zeros(3, 0.1);
    model.weights.iter_mut().for_each(|w| *w = rng.random_range(-1.0..1.0));
    model.bias = 0.3;
    let (_, gw, gb) = lr_loss_and_gradient(&model, &x, &labels);
    let h = 1e-6;
    for j in 0..3 {
        let (mut up, mut dn) = (model.clone(), model.clone());
        up.weights[j] += h;
        dn.weights[j] -= h;
        let fd = (lr_loss_and_gradient(&up, &x, &labels).0 - lr_loss_and_gradient(&dn, &x, &labels).0) / (2.0 * h);
        assert!((gw[j] - fd).abs() / fd.abs().max(1e-3) < 1e-4);
    }
    let (mut up, mut dn) = (model.clone(), model.clone());
    up.bias += h;
    dn.bias -= h;
    let fd = (lr_loss_and_gradient(&up, &x, &labels).0 - lr_loss_and_gradient(&dn, &x, &labels).0) / (2.0 * h);
    assert!((gb - fd).abs() / fd.abs().max(1e-3) < 1e-4);
}

#[test]
fn lr_descends() {
    let (x, labels) = clouds(100, 1.0, 3);
    let start = lr_loss_and_gradient(&LrModel::zeros(3, 1e-3), &x, &labels).0;
    let m = lr_fit(&x, &labels, &LrConfig::default()).unwrap();
    assert!(lr_loss_and_gradient(&m, &x, &labels).0 < start);
}

#[test]
fn svm_separates_clouds_and_objective_falls() {
    let (x, labels) = clouds(120, 4.0, 4);
    let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let (m, hist) = svm_fit_with_history(&x, &y, &SvmConfig::default(), 5).unwrap();
    let margins = svm_decision(&m, &x).unwrap();
    assert!(margins.iter().zip(&y).all(|(f, yi)| f * yi >= 0.0));
    assert!(hist.last().unwrap() < &hist[0]);
}

#[test]
fn forest_learns_a_threshold_rule() {
    let mut rng = derived_rng(6, "rule", 0);
    let rows: Vec<Vec<f64>> = (0..400).map(|_| (0..4).map(|_| rng.random::<f64>()).collect()).collect();
    let labels: Vec<u8> = rows.iter().map(|r| (r[2] > 0.4) as u8).collect();
    let x = FeatureMatrix::from_unnamed_rows(&rows).unwrap();
    let train: Vec<usize> = (0..300).collect();
    let test: Vec<usize> = (300..400).collect();
    let cfg = RfConfig { n_trees: 50, ..Default::default() };
    let model = rf_fit(&x.select_rows(&train), &labels[..300], &cfg, 7).unwrap();
    let p = rf_predict_proba(&model, &x.select_rows(&test)).unwrap();
    assert!(auc_mann_whitney(&p, &labels[300..]).unwrap() >= 0.95);
    assert!(model.trees.iter().all(|t| t.depth() <= cfg.max_depth));
}

#[test]
fn heads_are_deterministic_and_serializable() {
    let (x, labels) = clouds(60, 1.0, 8);
    for cfg in [
        ClassifierConfig::Lr(LrConfig::default()),
        ClassifierConfig::Svm(SvmConfig { epochs: 20, ..Default::default() }),
        ClassifierConfig::Rf(RfConfig { n_trees: 10, ..Default::default() }),
    ] {
        let a = cfg.fit(&x, &labels, 9).unwrap();
        let b = cfg.fit(&x, &labels, 9).unwrap();
        assert_eq!(a.to_text(), b.to_text(), "{}", cfg.name());
        let back = FittedClassifier::from_text(&a.to_text()).unwrap();
        assert_eq!(back.score(&x).unwrap(), a.score(&x).unwrap());
    }
}
