/**
 * View-model: one card per catalog entry plus its install state machine.
 *
 * Badges keep the deterministic order the store emits (warning kinds are
 * already sorted by the linter); install states only ever move
 * available -> installing -> installed | failed, and a failed install can
 * be retried.
 */

import type { PermissionWarning, StoreEntry } from "./api.js";

export type InstallState =
  | { phase: "available" }
  | { phase: "installing" }
  | { phase: "installed" }
  | { phase: "failed"; message: string };

export interface SkillCard {
  name: string;
  description: string;
  sourceUrl: string;
  badges: PermissionWarning[];
  topicsRead: string[];
  topicsWrite: string[];
  manifestFlags: { internet: boolean; containerFlags: string; hasAction: boolean };
  install: InstallState;
}

export function cardFromEntry(entry: StoreEntry): SkillCard {
  return {
    name: entry.name,
    description: entry.description,
    sourceUrl: entry.source_url,
    badges: entry.warnings.slice(),
    topicsRead: entry.manifest.topics_read.slice(),
    topicsWrite: entry.manifest.topics_write.slice(),
    manifestFlags: {
      internet: entry.manifest.needs_internet_access,
      containerFlags: entry.manifest.extra_container_flags,
      hasAction: entry.manifest.has_action,
    },
    install: { phase: "available" },
  };
}

/** True when a new install request may be issued for this card. */
export function canInstall(card: SkillCard): boolean {
  return card.install.phase === "available" || card.install.phase === "failed";
}

export function beginInstall(card: SkillCard): boolean {
  if (!canInstall(card)) {
    return false; // in flight or done; de-duplicates double clicks
  }
  card.install = { phase: "installing" };
  return true;
}

export function finishInstall(card: SkillCard, error?: string): void {
  if (card.install.phase !== "installing") {
    return;
  }
  card.install = error === undefined
    ? { phase: "installed" }
    : { phase: "failed", message: error };
}
