/**
 * Per-file view state: which anchor lines carry a gutter triangle, and
 * which diagrams are currently shown. Pure data, no editor API, so the
 * triangle/decoration consistency invariant is testable in isolation.
 */

import { Plan } from "./protocol";

export type TriangleDirection = "right" | "down";

export interface TriangleState {
  line: number;
  state: "available" | "shown";
}

export interface DecorationBinding {
  planId: string;
  anchorLine: number;
  svg: string;
  tip: string[];
  visible: boolean;
}

export function planId(plan: Plan, occurrence: number): string {
  return `${plan.code}@${plan.anchor_line}#${occurrence}`;
}

export type ToggleResult = "shown" | "hidden" | "no-triangle";

export class FileDiagramState {
  private bindings = new Map<string, DecorationBinding>();

  /**
   * Replace bindings with fresh plans. Diagrams that were visible and
   * whose plan id persists stay visible (re-rendered from the fresh SVG);
   * plans whose error disappeared drop their binding and triangle.
   */
  applyPlans(plans: Plan[], autoShow = false): void {
    const next = new Map<string, DecorationBinding>();
    const seen = new Map<string, number>();
    for (const plan of plans) {
      const key = `${plan.code}@${plan.anchor_line}`;
      const occurrence = seen.get(key) ?? 0;
      seen.set(key, occurrence + 1);
      const id = planId(plan, occurrence);
      const previous = this.bindings.get(id);
      next.set(id, {
        planId: id,
        anchorLine: plan.anchor_line,
        svg: plan.svg,
        tip: plan.tip,
        visible: previous ? previous.visible : autoShow,
      });
    }
    this.bindings = next;
  }

  /** One triangle per anchor line; down while any diagram there is shown. */
  triangles(): TriangleState[] {
    const byLine = new Map<number, boolean>();
    for (const binding of this.bindings.values()) {
      byLine.set(binding.anchorLine, (byLine.get(binding.anchorLine) ?? false) || binding.visible);
    }
    return [...byLine.entries()]
      .map(([line, shown]) => ({ line, state: shown ? "shown" : "available" } as TriangleState))
      .sort((a, b) => a.line - b.line);
  }

  toggleAtLine(line: number): ToggleResult {
    const atLine = [...this.bindings.values()].filter((b) => b.anchorLine === line);
    if (atLine.length === 0) {
      return "no-triangle";
    }
    const show = !atLine.some((b) => b.visible);
    for (const binding of atLine) {
      binding.visible = show;
    }
    return show ? "shown" : "hidden";
  }

  visibleBindings(): DecorationBinding[] {
    return [...this.bindings.values()].filter((b) => b.visible);
  }

  allBindings(): DecorationBinding[] {
    return [...this.bindings.values()];
  }

  hasVisible(): boolean {
    return this.visibleBindings().length > 0;
  }

  clear(): void {
    this.bindings.clear();
  }
}
