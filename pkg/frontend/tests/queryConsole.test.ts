import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { QueryConsole } from "../src/queryConsole";
import { FIXTURE_QUERY_RESPONSE, installFetchMock } from "./mockApi";

afterEach(() => vi.unstubAllGlobals());

function setup(routes: Parameters<typeof installFetchMock>[0]) {
  const calls = installFetchMock(routes);
  const consoleEl = new QueryConsole(new ApiClient("http://api.test"));
  document.body.replaceChildren(consoleEl.root);
  return { consoleEl, calls };
}

describe("query console", () => {
  it("displays replayed SQL and result rows", async () => {
    const { consoleEl } = setup([
      { method: "POST", path: "/query", body: FIXTURE_QUERY_RESPONSE },
    ]);
    (consoleEl.root.querySelector(".question") as HTMLInputElement).value =
      "Find the top 3 most frequent destinations.";
    await consoleEl.ask();

    const sql = (consoleEl.root.querySelector(".sql") as
      HTMLTextAreaElement).value;
    expect(sql).toBe(FIXTURE_QUERY_RESPONSE.generated_sql);

    const chips = [...consoleEl.root.querySelectorAll(".schema-chip")];
    expect((chips[0] as HTMLElement).dataset.docId).toBe("user_paths");

    const rows = [...consoleEl.root.querySelectorAll(".result-table tr")];
    expect(rows).toHaveLength(4); // header + 3 data rows
    expect(rows[1].textContent).toContain("E9");
    expect(rows[1].textContent).toContain("4");
  });

  it("shows an error toast with the API code on backend failure", async () => {
    const { consoleEl } = setup([
      { method: "POST", path: "/query", status: 502,
        body: { error: { code: "BACKEND_UNAVAILABLE", message: "down" } } },
    ]);
    (consoleEl.root.querySelector(".question") as HTMLInputElement).value =
      "anything";
    await consoleEl.ask();
    const toast = consoleEl.root.querySelector(".toast") as HTMLElement;
    expect(toast.hidden).toBe(false);
    expect(toast.textContent).toContain("BACKEND_UNAVAILABLE");
  });

  it("runs edited SQL and preserves the original in history", async () => {
    const edited = "SELECT end_edge FROM user_paths LIMIT 1";
    const { consoleEl, calls } = setup([
      { method: "POST", path: "/query", body: FIXTURE_QUERY_RESPONSE },
    ]);
    (consoleEl.root.querySelector(".question") as HTMLInputElement).value =
      FIXTURE_QUERY_RESPONSE.question;
    await consoleEl.ask();

    (consoleEl.root.querySelector(".sql") as HTMLTextAreaElement).value = edited;
    await consoleEl.runEdited();

    expect((calls[1].body as { sql?: string }).sql).toBe(edited);
    expect(consoleEl.history).toHaveLength(2);
    expect(consoleEl.history[0].executedSql)
      .toBe(FIXTURE_QUERY_RESPONSE.generated_sql);
    expect(consoleEl.history[1].generatedSql)
      .toBe(FIXTURE_QUERY_RESPONSE.generated_sql);
    expect(consoleEl.history[1].executedSql).toBe(edited);
  });
});
