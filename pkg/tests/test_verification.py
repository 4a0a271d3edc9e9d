from Picard.verification import verify_all, verify_discriminant, verify_lattice


def test_verify_discriminant_default_cases():
    report = verify_discriminant(2, 3, None, trials=3, seed=0)
    names = [check.name for check in report.checks]
    assert names[:4] == ["equivariance", "action_law", "repeated_root", "symbolic_homogeneity"]
    assert "delta_weight[n=2]" in names
    assert report.passed


def test_verify_discriminant_skips_large_n():
    report = verify_discriminant(2, 3, 9, trials=2, seed=0)
    assert report.passed
    assert "skipped" in report.checks[-1].detail


def test_verify_lattice_restricted():
    report = verify_lattice(trials=1, seed=0, r=2, n=4)
    assert report.passed, report.render()
    assert report.parameters == {"r": 2, "n": 4}


def test_verify_all_prefixes_checks():
    report = verify_all(2, 3, 4, trials=2, seed=0)
    assert report.passed, report.render()
    prefixes = {check.name.split(".")[0] for check in report.checks}
    assert prefixes == {"elimination[n=4]", "discriminant", "lattice"}
