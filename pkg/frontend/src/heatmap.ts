import type { PlanPayload } from "./api";
import { fmt3 } from "./format";

// Transport-plan heatmap. Masses with uniform marginals are tiny in
// absolute terms (at most 1/max(n_a, n_b)), so the color scale is
// normalized per plan to the heaviest cell.

export interface HeatmapCell {
  row: number;
  col: number;
  mass: number;
  cost: number | null;
  intensity: number; // mass / maxMass, in (0, 1]
}

export interface HeatmapModel {
  rows: number;
  cols: number;
  maxMass: number;
  cells: HeatmapCell[];
  grid: (HeatmapCell | null)[][];
}

export function buildHeatmapModel(plan: PlanPayload): HeatmapModel {
  const grid: (HeatmapCell | null)[][] = Array.from({ length: plan.n_a }, () =>
    Array.from({ length: plan.n_b }, () => null),
  );
  let maxMass = 0;
  for (const [, , mass] of plan.plan) {
    if (mass > maxMass) maxMass = mass;
  }
  const cells: HeatmapCell[] = plan.plan.map(([row, col, mass], index) => {
    const cell: HeatmapCell = {
      row,
      col,
      mass,
      cost: plan.costs?.[index] ?? null,
      intensity: maxMass > 0 ? mass / maxMass : 0,
    };
    const gridRow = grid[row];
    if (gridRow) gridRow[col] = cell;
    return cell;
  });
  return { rows: plan.n_a, cols: plan.n_b, maxMass, cells, grid };
}

export interface HeatmapRenderOptions {
  queryIds: string[];
  targetIds: string[];
  imagePathFor?: (side: "query" | "target", id: string) => string | null;
  onHover?: (cell: HeatmapCell | null) => void;
}

function pairBadge(side: "query" | "target", id: string, options: HeatmapRenderOptions): HTMLElement {
  const path = options.imagePathFor?.(side, id) ?? null;
  if (path) {
    const img = document.createElement("img");
    img.className = "pair-thumb";
    img.src = path;
    img.alt = id;
    return img;
  }
  const badge = document.createElement("span");
  badge.className = "id-badge";
  badge.textContent = id;
  return badge;
}

export function renderHeatmap(model: HeatmapModel, options: HeatmapRenderOptions): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "heatmap";
  wrap.style.setProperty("--cols", String(model.cols));

  const tooltip = document.createElement("div");
  tooltip.className = "heatmap-tooltip";
  tooltip.hidden = true;

  for (let row = 0; row < model.rows; row++) {
    for (let col = 0; col < model.cols; col++) {
      const cell = model.grid[row]?.[col] ?? null;
      const div = document.createElement("div");
      div.className = "heatmap-cell";
      div.dataset.row = String(row);
      div.dataset.col = String(col);
      if (cell) {
        div.dataset.mass = String(cell.mass);
        if (cell.cost !== null) div.dataset.cost = String(cell.cost);
        div.style.opacity = String(Math.max(cell.intensity, 0.08));
        div.classList.add("filled");
        div.addEventListener("mouseenter", () => {
          tooltip.replaceChildren(
            pairBadge("query", options.queryIds[row] ?? String(row), options),
            document.createTextNode(" ↔ "),
            pairBadge("target", options.targetIds[col] ?? String(col), options),
            document.createTextNode(
              ` mass ${fmt3(cell.mass)}` + (cell.cost !== null ? ` · cost ${fmt3(cell.cost)}` : ""),
            ),
          );
          tooltip.hidden = false;
          options.onHover?.(cell);
        });
        div.addEventListener("mouseleave", () => {
          tooltip.hidden = true;
          options.onHover?.(null);
        });
      }
      wrap.appendChild(div);
    }
  }

  const outer = document.createElement("div");
  outer.className = "heatmap-outer";
  outer.append(wrap, tooltip);
  return outer;
}

export function renderTopPairs(plan: PlanPayload, options: HeatmapRenderOptions): HTMLElement {
  const list = document.createElement("ol");
  list.className = "top-pairs";
  for (const pair of plan.topPairs) {
    const item = document.createElement("li");
    item.dataset.mass = String(pair.mass);
    item.append(
      pairBadge("query", pair.queryScreenshotId, options),
      document.createTextNode(" ↔ "),
      pairBadge("target", pair.targetScreenshotId, options),
      document.createTextNode(` mass ${fmt3(pair.mass)} · cost ${fmt3(pair.cost)}`),
    );
    list.appendChild(item);
  }
  return list;
}
