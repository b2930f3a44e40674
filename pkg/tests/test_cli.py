import pytest

from gazelab.cli import main, normalize_condition
from gazelab.dataset import load_session
from gazelab.errors import UsageError
from gazelab.features import read_matrix_csv


@pytest.fixture(scope="module")
def session_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sessions")
    code = main([
        "synth", "--task", "user_distance", "--participants", "2",
        "--samples-per-aoi", "6", "--seed", "11", "--out", str(out),
    ])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def features_csv(session_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("features")
    inputs = sorted(str(p) for p in session_dir.glob("P*.csv"))
    code = main([
        "features", "--input", *inputs, "--task", "user_distance",
        "--kernel", "5", "--seed", "3", "--out", str(out),
    ])
    assert code == 0
    return out / "features.csv"


def test_synth_writes_sessions(session_dir):
    files = sorted(session_dir.glob("P*.csv"))
    assert len(files) == 8  # 2 participants x 4 distances
    session = load_session(files[0])
    assert len(session) == 90
    assert (session_dir / "sessions_index.csv").exists()


def test_synth_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        main(["synth", "--task", "user_distance", "--participants", "1",
              "--samples-per-aoi", "5", "--seed", "4", "--out", str(out)])
    fa = (a / "P01_UD50.csv").read_bytes()
    fb = (b / "P01_UD50.csv").read_bytes()
    assert fa == fb


def test_clean_writes_error_series(session_dir, tmp_path):
    src = sorted(session_dir.glob("P*.csv"))[0]
    code = main(["clean", "--input", str(src), "--method", "median",
                 "--kernel", "5", "--out", str(tmp_path)])
    assert code == 0
    out = tmp_path / f"{src.stem}_errors.csv"
    text = out.read_text().splitlines()
    assert text[3] == "timestamp_ms,aoi_id,frontal_err,yaw_err,pitch_err"
    assert len(text) == 4 + 90


def test_stats_outputs(session_dir, tmp_path):
    inputs = sorted(str(p) for p in session_dir.glob("P01_*.csv"))
    code = main(["stats", "--input", *inputs, "--kernel", "5", "--out", str(tmp_path)])
    assert code == 0
    stats = (tmp_path / "stats.csv").read_text().splitlines()
    assert stats[0] == "dataset,mean,mad,iqr,ci95_low,ci95_high,n"
    assert len(stats) == 1 + 4 * 3  # four sessions x three categories
    assert (tmp_path / "correlation.csv").exists()
    assert (tmp_path / "P01_UD50_spatial.csv").exists()


def test_augment_writes_ten_variants(session_dir, tmp_path):
    src = sorted(session_dir.glob("P*.csv"))[0]
    code = main(["augment", "--input", str(src), "--kernel", "5",
                 "--seed", "2", "--out", str(tmp_path)])
    assert code == 0
    variants = sorted(tmp_path.glob(f"{src.stem}_aug*.csv"))
    assert len(variants) == 10
    first = variants[0].read_text().splitlines()
    assert first[0] == "# augmented_by=gaussian"


def test_features_matrix_shape(features_csv):
    m = read_matrix_csv(features_csv)
    # 2 participants x 4 classes x 10 variants x 3 categories
    assert len(m) == 240
    assert m.rows.shape[1] == 20
    assert m.class_names == ["UD50", "UD60", "UD70", "UD80"]


def test_tsne_csv(features_csv, tmp_path):
    code = main(["tsne", "--input", str(features_csv), "--perplexity", "20",
                 "--iters", "120", "--seed", "0", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "tsne.csv").read_text().splitlines()
    assert lines[0] == "x,y,label"
    assert len(lines) == 241


def test_train_knn(features_csv, tmp_path):
    code = main(["train", "--input", str(features_csv), "--model", "knn",
                 "--k", "3", "--cv", "5", "--seed", "0", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "cv_scores.csv").exists()
    assert (tmp_path / "confusion.csv").exists()
    assert (tmp_path / "rates.csv").exists()
    assert (tmp_path / "model.txt").read_text().startswith("# gazelab-model v1")


def test_evaluate_grid(features_csv, tmp_path):
    code = main(["evaluate", "--input", str(features_csv), "--model", "knn",
                 "--grid", "k=1,3", "--cv", "4", "--seed", "0", "--out", str(tmp_path)])
    assert code == 0
    grid = (tmp_path / "grid.csv").read_text().splitlines()
    assert len(grid) == 3
    assert (tmp_path / "best_params.txt").exists()


def test_regress_coefficients(session_dir, tmp_path):
    inputs = sorted(str(p) for p in session_dir.glob("P*_UD60.csv"))
    code = main(["regress", "--input", *inputs, "--condition", "UD60",
                 "--penalty", "elasticnet", "--alpha", "0.05", "--kernel", "5",
                 "--seed", "1", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "coefficients.csv").read_text().splitlines()
    assert lines[0] == "condition,b1,b2,b3,intercept,rmse"
    assert lines[1].startswith("UD60,")


def test_train_outputs_byte_deterministic(features_csv, tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        main(["train", "--input", str(features_csv), "--model", "knn",
              "--k", "3", "--cv", "4", "--seed", "5", "--out", str(out)])
        outs.append(out)
    for artifact in ("cv_scores.csv", "confusion.csv", "rates.csv", "model.txt"):
        assert (outs[0] / artifact).read_bytes() == (outs[1] / artifact).read_bytes()


def test_report_aggregates(features_csv, tmp_path):
    main(["train", "--input", str(features_csv), "--model", "knn",
          "--k", "1", "--cv", "4", "--seed", "0", "--out", str(tmp_path)])
    code = main(["report", "--out", str(tmp_path)])
    assert code == 0
    report = (tmp_path / "report.md").read_text()
    assert "Cross-validation scores" in report


def test_config_file_defaults(session_dir, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("participants=1\nsamples_per_aoi=5\ntask=user_distance\n")
    out = tmp_path / "out"
    code = main(["synth", "--config", str(cfg), "--seed", "0", "--out", str(out)])
    assert code == 0
    assert len(list(out.glob("P*.csv"))) == 4  # config participant count used
    # explicit flag overrides the config value
    out2 = tmp_path / "out2"
    code = main(["synth", "--config", str(cfg), "--participants", "2",
                 "--seed", "0", "--out", str(out2)])
    assert code == 0
    assert len(list(out2.glob("P*.csv"))) == 8


def test_exit_codes(tmp_path):
    assert main(["clean"]) == 1  # missing --input
    assert main(["nonsense"]) == 1
    missing = tmp_path / "missing.csv"
    assert main(["clean", "--input", str(missing), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,session\n")
    assert main(["clean", "--input", str(bad), "--out", str(tmp_path)]) == 2


def test_numeric_failure_exit_code(tmp_path):
    # constant feature column cannot be standardized -> exit 3
    header = ",".join([f"f{i}" for i in range(3)]) + ",label,category"
    rows = [f"1.0,{i}.0,{i * 2}.0,A,frontal" for i in range(10)]
    rows += [f"1.0,{i}.5,{i * 3}.0,B,frontal" for i in range(10)]
    feat = tmp_path / "features.csv"
    feat.write_text("\n".join([header] + rows) + "\n")
    assert main(["tsne", "--input", str(feat), "--perplexity", "2",
                 "--iters", "10", "--out", str(tmp_path)]) == 3


def test_plot_flag_writes_svg(features_csv, tmp_path):
    code = main(["train", "--input", str(features_csv), "--model", "knn",
                 "--k", "3", "--cv", "4", "--seed", "0", "--plot",
                 "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "confusion.svg").exists()
    head = (tmp_path / "confusion.svg").read_text()[:200]
    assert "<svg" in head


def test_condition_aliases():
    assert normalize_condition("head_roll20") == "HeadRoll20"
    assert normalize_condition("ud60") == "UD60"
    assert normalize_condition("PlatYaw20") == "PlatYaw20"
    with pytest.raises(UsageError):
        normalize_condition("sideways")
