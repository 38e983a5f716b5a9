// Supplemental node-link view of the group graph. Nodes are formula groups
// laid out on a circle; clicking a node navigates the grid to its range.

import { StructureModel } from "./api.js";
import { fillFor } from "./overlays.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface GraphCallbacks {
  onNodeClick: (groupId: string, range: string) => void;
}

export class GraphPanel {
  private svg: SVGSVGElement;

  constructor(root: HTMLElement, private callbacks: GraphCallbacks,
              private size = 360) {
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("class", "group-graph");
    this.svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
    root.appendChild(this.svg);
  }

  get element(): SVGSVGElement {
    return this.svg;
  }

  render(model: StructureModel | null): void {
    this.svg.innerHTML = "";
    if (!model || model.groups.length === 0) return;

    const center = this.size / 2;
    const radius = this.size / 2 - 60;
    const positions = new Map<string, { x: number; y: number }>();
    model.groups.forEach((group, index) => {
      const angle = (2 * Math.PI * index) / model.groups.length;
      positions.set(group.id, {
        x: center + radius * Math.cos(angle),
        y: center + radius * Math.sin(angle),
      });
    });

    for (const [from, to] of model.edges) {
      const a = positions.get(from);
      const b = positions.get(to);
      if (!a || !b) continue;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.setAttribute("class", "graph-edge");
      this.svg.appendChild(line);
    }

    model.groups.forEach((group, index) => {
      const pos = positions.get(group.id)!;
      const node = document.createElementNS(SVG_NS, "g");
      node.setAttribute("class", "graph-node");
      node.setAttribute("data-group", group.id);
      node.setAttribute("data-range", group.range);
      node.addEventListener("click", () => {
        this.callbacks.onNodeClick(group.id, group.range);
      });

      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(pos.x));
      circle.setAttribute("cy", String(pos.y));
      circle.setAttribute("r", "22");
      circle.setAttribute("fill", fillFor(index));
      node.appendChild(circle);

      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(pos.x));
      label.setAttribute("y", String(pos.y + 38));
      label.setAttribute("text-anchor", "middle");
      label.textContent = group.range;
      node.appendChild(label);

      this.svg.appendChild(node);
    });
  }
}
