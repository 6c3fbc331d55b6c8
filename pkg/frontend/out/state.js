"use strict";
/**
 * Per-file view state: which anchor lines carry a gutter triangle, and
 * which diagrams are currently shown. Pure data, no editor API, so the
 * triangle/decoration consistency invariant is testable in isolation.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.FileDiagramState = void 0;
exports.planId = planId;
function planId(plan, occurrence) {
    return `${plan.code}@${plan.anchor_line}#${occurrence}`;
}
class FileDiagramState {
    constructor() {
        this.bindings = new Map();
    }
    /**
     * Replace bindings with fresh plans. Diagrams that were visible and
     * whose plan id persists stay visible (re-rendered from the fresh SVG);
     * plans whose error disappeared drop their binding and triangle.
     */
    applyPlans(plans, autoShow = false) {
        const next = new Map();
        const seen = new Map();
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
    triangles() {
        const byLine = new Map();
        for (const binding of this.bindings.values()) {
            byLine.set(binding.anchorLine, (byLine.get(binding.anchorLine) ?? false) || binding.visible);
        }
        return [...byLine.entries()]
            .map(([line, shown]) => ({ line, state: shown ? "shown" : "available" }))
            .sort((a, b) => a.line - b.line);
    }
    toggleAtLine(line) {
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
    visibleBindings() {
        return [...this.bindings.values()].filter((b) => b.visible);
    }
    allBindings() {
        return [...this.bindings.values()];
    }
    hasVisible() {
        return this.visibleBindings().length > 0;
    }
    clear() {
        this.bindings.clear();
    }
}
exports.FileDiagramState = FileDiagramState;
//# sourceMappingURL=state.js.map