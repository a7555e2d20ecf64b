"""SVG overlay rendering: determinism, per-frame files, empty canvases."""

from motrack import BoundingBox
from motrack.render import render_frame_svg, render_results, track_color


class TestTrackColor:
    def test_deterministic(self):
        assert track_color(5) == track_color(5)

    def test_small_ids_distinct(self):
        colors = [track_color(i) for i in range(1, 20)]
        assert len(set(colors)) == len(colors)

    def test_css_hsl_form(self):
        assert track_color(1).startswith("hsl(")


class TestFrameSvg:
    def test_one_rectangle_and_label_per_track(self):
        rows = [(1, BoundingBox(5, 6, 10, 20)), (2, BoundingBox(40, 6, 10, 20))]
        svg = render_frame_svg(rows, 640, 480)
        assert svg.count("<rect") == 2
        assert svg.count("<text") == 2
        assert ">1</text>" in svg and ">2</text>" in svg

    def test_same_id_same_color_across_frames(self):
        a = render_frame_svg([(3, BoundingBox(0, 0, 5, 5))], 64, 64)
        b = render_frame_svg([(3, BoundingBox(20, 20, 5, 5))], 64, 64)
        color = track_color(3)
        assert color in a and color in b

    def test_empty_frame_is_valid_svg(self):
        svg = render_frame_svg([], 640, 480)
        assert svg.startswith("<svg")
        assert svg.rstrip().endswith("</svg>")
        assert "<rect" not in svg

    def test_canvas_dimensions(self):
        svg = render_frame_svg([], 123, 45)
        assert 'width="123"' in svg and 'height="45"' in svg


class TestRenderResults:
    def test_one_file_per_frame_with_gaps_filled(self, tmp_path):
        results = {
            1: [(1, BoundingBox(0, 0, 5, 5))],
            3: [(1, BoundingBox(10, 0, 5, 5))],
        }
        count = render_results(results, 64, 64, tmp_path / "svg")
        assert count == 3
        files = sorted(p.name for p in (tmp_path / "svg").glob("*.svg"))
        assert files == ["frame_000001.svg", "frame_000002.svg", "frame_000003.svg"]
        gap = (tmp_path / "svg" / "frame_000002.svg").read_text()
        assert "<rect" not in gap

    def test_empty_results(self, tmp_path):
        assert render_results({}, 64, 64, tmp_path / "svg") == 0
        assert list((tmp_path / "svg").glob("*.svg")) == []

    def test_rows_sorted_by_id(self, tmp_path):
        results = {1: [(9, BoundingBox(0, 0, 5, 5)), (2, BoundingBox(9, 0, 5, 5))]}
        render_results(results, 64, 64, tmp_path / "svg")
        svg = (tmp_path / "svg" / "frame_000001.svg").read_text()
        assert svg.index(">2</text>") < svg.index(">9</text>")
