import { describe, expect, it } from "vitest";

import { Plan } from "../src/protocol";
import { FileDiagramState, planId } from "../src/state";

function makePlan(code: string, anchorLine: number, svg = "<svg/>"): Plan {
  return {
    code,
    file: "src/main.rs",
    anchor_line: anchorLine,
    regions: [],
    arrows: [],
    tip: [`fix ${code}`],
    svg,
  };
}

describe("planId", () => {
  it("distinguishes repeated errors on the same line", () => {
    const plan = makePlan("E0382", 15);
    expect(planId(plan, 0)).toBe("E0382@15#0");
    expect(planId(plan, 1)).toBe("E0382@15#1");
  });
});

describe("FileDiagramState", () => {
  it("starts with triangles available and no visible diagrams", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15)]);
    expect(state.triangles()).toEqual([{ line: 15, state: "available" }]);
    expect(state.visibleBindings()).toEqual([]);
    expect(state.hasVisible()).toBe(false);
  });

  it("toggle shows, toggle again hides", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15)]);

    expect(state.toggleAtLine(15)).toBe("shown");
    expect(state.triangles()).toEqual([{ line: 15, state: "shown" }]);
    expect(state.visibleBindings().map((b) => b.planId)).toEqual(["E0382@15#0"]);

    expect(state.toggleAtLine(15)).toBe("hidden");
    expect(state.triangles()).toEqual([{ line: 15, state: "available" }]);
    expect(state.visibleBindings()).toEqual([]);
  });

  it("reports no-triangle on lines without plans", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15)]);
    expect(state.toggleAtLine(3)).toBe("no-triangle");
  });

  it("keeps visibility across a rebuild when the plan id persists", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15, "<svg>old</svg>")]);
    state.toggleAtLine(15);

    state.applyPlans([makePlan("E0382", 15, "<svg>new</svg>")]);
    const visible = state.visibleBindings();
    expect(visible).toHaveLength(1);
    expect(visible[0].svg).toBe("<svg>new</svg>");
    expect(state.triangles()).toEqual([{ line: 15, state: "shown" }]);
  });

  it("drops bindings and triangles for resolved errors", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15), makePlan("E0597", 5)]);
    state.toggleAtLine(15);

    state.applyPlans([makePlan("E0597", 5)]);
    expect(state.triangles()).toEqual([{ line: 5, state: "available" }]);
    expect(state.visibleBindings()).toEqual([]);

    state.applyPlans([]);
    expect(state.triangles()).toEqual([]);
    expect(state.hasVisible()).toBe(false);
  });

  it("shows every diagram on an anchor line with one toggle", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15), makePlan("E0505", 15)]);
    expect(state.triangles()).toEqual([{ line: 15, state: "available" }]);

    expect(state.toggleAtLine(15)).toBe("shown");
    expect(state.visibleBindings()).toHaveLength(2);
    expect(state.toggleAtLine(15)).toBe("hidden");
    expect(state.visibleBindings()).toHaveLength(0);
  });

  it("autoShow makes fresh plans visible immediately", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15)], true);
    expect(state.triangles()).toEqual([{ line: 15, state: "shown" }]);
    expect(state.hasVisible()).toBe(true);
  });

  it("autoShow does not resurrect a diagram the user hid", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15)], true);
    state.toggleAtLine(15);

    state.applyPlans([makePlan("E0382", 15)], true);
    expect(state.visibleBindings()).toEqual([]);
  });

  it("triangle state always agrees with binding visibility", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15), makePlan("E0382", 15), makePlan("E0499", 4)]);
    state.toggleAtLine(4);

    for (const triangle of state.triangles()) {
      const visibleHere = state
        .visibleBindings()
        .some((b) => b.anchorLine === triangle.line);
      expect(triangle.state === "shown").toBe(visibleHere);
    }
  });

  it("clear removes everything", () => {
    const state = new FileDiagramState();
    state.applyPlans([makePlan("E0382", 15)], true);
    state.clear();
    expect(state.triangles()).toEqual([]);
    expect(state.allBindings()).toEqual([]);
  });
});
