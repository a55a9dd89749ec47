"""Vector graphics of the polytope, generators, fields and trajectories."""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .geometry import HirzebruchModel
from .lagrangian import _field

SCALE = 80.0  # pixels per moment-coordinate unit
MARGIN = 40.0
SVG_NS = "http://www.w3.org/2000/svg"


class Canvas:
    def __init__(self, model: HirzebruchModel):
        self.model = model
        poly = model.polytope
        self.width = poly.width * SCALE + 2 * MARGIN
        self.height = poly.height * SCALE + 2 * MARGIN
        self._h = poly.height
        self.root = ET.Element(
            "svg",
            xmlns=SVG_NS,
            width=f"{self.width:.0f}",
            height=f"{self.height:.0f}",
            viewBox=f"0 0 {self.width:.0f} {self.height:.0f}",
        )

    def xy(self, X) -> tuple[float, float]:
        return MARGIN + SCALE * float(X[0]), MARGIN + SCALE * (self._h - float(X[1]))

    def polytope(self):
        poly = self.model.polytope
        pts = " ".join("{:.3f},{:.3f}".format(*self.xy(v)) for v in poly.vertices)
        ET.SubElement(self.root, "polygon", points=pts, fill="#f4f4f4", stroke="black")
        verts = poly.vertices
        mids = {
            "E1": (verts[3], verts[0]),
            "E2": (verts[0], verts[1]),
            "E3": (verts[1], verts[2]),
            "E4": (verts[2], verts[3]),
        }
        for name, (A, B) in mids.items():
            x, y = self.xy(((A[0] + B[0]) / 2, (A[1] + B[1]) / 2))
            label = ET.SubElement(self.root, "text", x=f"{x:.3f}", y=f"{y:.3f}", fill="#555")
            label.set("font-size", "12")
            label.text = name

    def dot(self, X, filled=True, color="black"):
        x, y = self.xy(X)
        ET.SubElement(
            self.root,
            "circle",
            cx=f"{x:.3f}",
            cy=f"{y:.3f}",
            r="4",
            fill=color if filled else "white",
            stroke=color,
        )

    def cross(self, X, color="crimson"):
        x, y = self.xy(X)
        d = 4.0
        for sgn in (1, -1):
            ET.SubElement(
                self.root,
                "line",
                x1=f"{x - d:.3f}",
                y1=f"{y - sgn * d:.3f}",
                x2=f"{x + d:.3f}",
                y2=f"{y + sgn * d:.3f}",
                stroke=color,
            )

    def polyline(self, path, color="navy", width=1.5):
        pts = " ".join("{:.3f},{:.3f}".format(*self.xy(X)) for X in path)
        el = ET.SubElement(self.root, "polyline", points=pts, fill="none", stroke=color)
        el.set("stroke-width", str(width))

    def component(self, geometry, degree=None, rejected=False):
        if rejected:
            for X in geometry.points[:2] if geometry.kind == "segment" else [geometry.point]:
                self.cross(X)
            if geometry.kind == "segment":
                self.polyline(geometry.points, color="crimson", width=1.0)
            return
        if geometry.kind == "segment":
            self.polyline(geometry.points, color="black", width=3.0)
        self.dot(geometry.point, filled=(degree == 0))

    def quiver(self, label, index, n: int = 17):
        poly = self.model.polytope
        g1 = np.linspace(0.0, poly.width, n)
        g2 = np.linspace(0.0, poly.height, max(3, int(n * poly.height / poly.width) + 1))
        X1, X2 = np.meshgrid(g1, g2)
        pts = [(a, b) for a, b in zip(X1.ravel(), X2.ravel()) if poly.contains((a, b))]
        if not pts:
            return
        F = np.array([_field(self.model, label, index, X) for X in pts])
        norm = np.max(np.hypot(F[:, 0], F[:, 1]))
        step = 0.45 * poly.width / (n - 1)
        for X, v in zip(pts, F):
            if norm == 0.0:
                continue
            d = step * v / norm
            x0, y0 = self.xy(X)
            x1, y1 = self.xy((X[0] + d[0], X[1] + d[1]))
            ET.SubElement(
                self.root,
                "line",
                x1=f"{x0:.3f}",
                y1=f"{y0:.3f}",
                x2=f"{x1:.3f}",
                y2=f"{y1:.3f}",
                stroke="#4a7",
            )
            ET.SubElement(self.root, "circle", cx=f"{x1:.3f}", cy=f"{y1:.3f}", r="1.2", fill="#4a7")

    def tostring(self) -> str:
        return ET.tostring(self.root, encoding="unicode")

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.tostring())


def polytope_svg(model: HirzebruchModel) -> Canvas:
    canvas = Canvas(model)
    canvas.polytope()
    return canvas


def hom_svg(model: HirzebruchModel, hom) -> Canvas:
    canvas = polytope_svg(model)
    for r in hom.rejected:
        canvas.component(r.geometry, r.degree, rejected=True)
    for g in hom.generators:
        if g.geometry.kind != "whole":
            canvas.component(g.geometry, g.degree)
    return canvas


def flow_svg(model: HirzebruchModel, label, index, components=(), degrees=(), trees=()) -> Canvas:
    canvas = polytope_svg(model)
    canvas.quiver(label, index)
    for tree in trees:
        for leg in tree.legs:
            canvas.polyline(leg)
    for comp, deg in zip(components, degrees):
        if comp.kind == "whole":
            continue
        canvas.component(comp, deg, rejected=deg is None)
    return canvas


__all__ = ["Canvas", "SCALE", "flow_svg", "hom_svg", "polytope_svg"]
