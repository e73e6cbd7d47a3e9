import pytest

from cutaway.svgplot import svg_line_plot


def _plot(**kw):
    args = dict(
        curves=[("recall", [0.0, 0.5, 1.0], [1.0, 0.8, 0.3])],
        title="pr", x_label="recall", y_label="precision",
    )
    args.update(kw)
    return svg_line_plot(**args)


def test_is_standalone_svg_document():
    svg = _plot()
    assert svg.startswith("<svg xmlns=")
    assert svg.rstrip().endswith("</svg>")


def test_byte_deterministic():
    assert _plot() == _plot()


def test_curve_labels_and_polylines():
    svg = _plot(curves=[
        ("observed", [0, 1, 2], [0.1, 0.5, 0.2]),
        ("baseline", [0, 1, 2], [0.3, 0.3, 0.3]),
    ])
    assert svg.count("<polyline") == 2
    assert ">observed</text>" in svg
    assert ">baseline</text>" in svg
    # distinct series get distinct stroke colors
    strokes = [line for line in svg.splitlines() if "<polyline" in line]
    assert strokes[0] != strokes[1]


def test_axis_labels_and_title():
    svg = _plot(title="agreement over time", x_label="time (s)",
                y_label="probability")
    assert ">agreement over time</text>" in svg
    assert ">time (s)</text>" in svg
    assert ">probability</text>" in svg


def test_dimensions_respected():
    svg = _plot(width=320, height=200)
    assert 'width="320"' in svg
    assert 'height="200"' in svg
    assert 'viewBox="0 0 320 200"' in svg


def test_fixed_y_range_scales_points():
    # with y pinned to [0, 1] a point at y=1 sits at the top margin
    svg = _plot(curves=[("c", [0.0, 1.0], [1.0, 1.0])], y_max=1.0)
    line = next(l for l in svg.splitlines() if "<polyline" in l)
    assert "46.00" in line  # top margin y-coordinate


def test_flat_curve_does_not_divide_by_zero():
    svg = _plot(curves=[("flat", [0.0, 1.0], [0.0, 0.0])])
    assert "<polyline" in svg


def test_single_x_value_does_not_divide_by_zero():
    svg = _plot(curves=[("point", [2.0, 2.0], [0.1, 0.9])])
    assert "<polyline" in svg


def test_empty_curve_list_rejected():
    with pytest.raises(ValueError):
        svg_line_plot([], title="t", x_label="x", y_label="y")


def test_pointless_curves_rejected():
    with pytest.raises(ValueError):
        svg_line_plot([("c", [], [])], title="t", x_label="x", y_label="y")
