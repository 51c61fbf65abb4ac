mod support;

use lupi_svm::data::{synth_lupi, SynthSpec};
use lupi_svm::kernels::KernelSpec;
use lupi_svm::linalg::DenseMatrix;
use lupi_svm::trainers::{
    predict, train_one_vs_rest, train_one_vs_rest_jobs, train_svm, BinaryModel, Hyperparameters, Method,
    MulticlassModel,
};
use lupi_svm::Error;
use support::Stream;

/// Three tight clusters around well separated centres, 20 points each.
fn clusters(seed: u64) -> (DenseMatrix, DenseMatrix, Vec<i64>) {
    let centres = [[0.0, 4.0], [-4.0, -3.0], [4.0, -3.0]];
    let labels_of = [7i64, -2, 3];
    let mut s = Stream::new(seed);
    let mut rows = Vec::new();
    let mut priv_rows = Vec::new();
    let mut labels = Vec::new();
    for k in 0..60 {
        let c = k % 3;
        rows.push(vec![centres[c][0] + s.uniform(-1.0, 1.0), centres[c][1] + s.uniform(-1.0, 1.0)]);
        priv_rows.push(vec![s.uniform(0.0, 1.0)]);
        labels.push(labels_of[c]);
    }
    (
        DenseMatrix::from_rows(&rows).unwrap(),
        DenseMatrix::from_rows(&priv_rows).unwrap(),
        labels,
    )
}

#[test]
fn three_clusters_are_learned_by_every_method() {
    let (x, z, labels) = clusters(1);
    for method in Method::ALL {
        let hp = Hyperparameters::new(1.0, 1.0);
        let model = train_one_vs_rest(&x, Some(&z), &labels, &hp, method).unwrap();
        assert_eq!(model.classes, vec![-2, 3, 7]);
        assert_eq!(model.class_counts, vec![20, 20, 20]);
        assert_eq!(model.binaries.len(), 3);
        assert!(model.binaries.iter().all(|b| b.kernel == hp.kernel_main));
        let predicted = predict(&model, &x).unwrap();
        let correct = predicted.iter().zip(&labels).filter(|(a, b)| a == b).count();
        assert!(correct as f64 / 60.0 >= 0.95, "{method}: {correct}/60");
    }
}

#[test]
fn prediction_is_argmax_of_binary_outputs() {
    let (x, z, labels) = clusters(2);
    let model = train_one_vs_rest(&x, Some(&z), &labels, &Hyperparameters::new(0.1, 1.0), Method::Svm2Plus).unwrap();
    let probe = Stream::new(5).matrix(40, 2).scale(6.0);
    let predicted = predict(&model, &probe).unwrap();
    for i in 0..probe.rows() {
        let row = probe.row(i);
        let scores: Vec<f64> = model.binaries.iter().map(|b| b.decision_value(&row)).collect();
        let mut best = 0;
        for c in 0..scores.len() {
            if scores.iter().all(|&s| scores[c] >= s) {
                best = c;
                break;
            }
        }
        assert_eq!(predicted[i], model.classes[best]);
    }
}

#[test]
fn ties_go_to_first_class() {
    let flat = BinaryModel {
        method: Method::Svm,
        kernel: KernelSpec::Linear,
        dim: 2,
        coefficients: vec![],
        support_vectors: vec![],
        bias: 0.0,
        diagnostics: None,
    };
    let model = MulticlassModel {
        method: Method::Svm,
        kernel: KernelSpec::Linear,
        dim: 2,
        classes: vec![4, 9, 11],
        class_counts: vec![],
        binaries: vec![flat.clone(), flat.clone(), flat],
    };
    assert_eq!(predict(&model, &DenseMatrix::zeros(3, 2)).unwrap(), vec![4, 4, 4]);
    assert!(matches!(predict(&model, &DenseMatrix::zeros(1, 5)), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn two_classes_give_complementary_binaries() {
    let mut s = Stream::new(9);
    let x = s.matrix(20, 3);
    let labels: Vec<i64> = (0..20).map(|i| if s.uniform(0.0, 1.0) < 0.5 || i == 0 { 1 } else { 2 }).collect();
    let model = train_one_vs_rest(&x, None, &labels, &Hyperparameters::default(), Method::Svm).unwrap();
    assert_eq!(model.binaries.len(), 2);
    for i in 0..20 {
        let row = x.row(i);
        assert_eq!(model.binaries[0].decision_value(&row), -model.binaries[1].decision_value(&row));
    }
    let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let direct = train_svm(&x, &y, &Hyperparameters::default()).unwrap();
    assert_eq!(direct.coefficients, model.binaries[0].coefficients);
}

#[test]
fn parallel_training_matches_sequential() {
    let (x, z, labels) = clusters(3);
    let hp = Hyperparameters::new(1.0, 1.0);
    for method in Method::ALL {
        let one = train_one_vs_rest(&x, Some(&z), &labels, &hp, method).unwrap();
        let many = train_one_vs_rest_jobs(&x, Some(&z), &labels, &hp, method, 3).unwrap();
        assert_eq!(one, many);
    }
}

#[test]
fn single_class_is_rejected() {
    let x = DenseMatrix::zeros(4, 1);
    assert!(matches!(
        train_one_vs_rest(&x, None, &[5, 5, 5, 5], &Hyperparameters::default(), Method::Svm),
        Err(Error::SingleClassDataset)
    ));
    assert!(matches!(
        train_one_vs_rest(&x, None, &[5, 5, 5, 6], &Hyperparameters::default(), Method::Svm2Plus),
        Err(Error::AlignmentError { .. })
    ));
}

#[test]
fn clean_synthetic_data_is_separated_by_plain_svm() {
    let spec = SynthSpec {
        flip_probability: 0.0,
        min_margin: 1.0,
        seed: 4,
        ..SynthSpec::default()
    };
    let data = synth_lupi(&spec).unwrap();
    let x = data.train.x_dense().unwrap();
    let y: Vec<f64> = data.train.y.iter().map(|&l| l as f64).collect();
    let model = train_svm(&x, &y, &Hyperparameters::new(10.0, 1.0)).unwrap();
    let test = data.test.x_dense().unwrap();
    let f = lupi_svm::trainers::decision_values(&model, &test).unwrap();
    let correct = f.iter().zip(&data.test.y).filter(|(f, &l)| f.signum() == l as f64).count();
    assert_eq!(correct, spec.n_test);
}
