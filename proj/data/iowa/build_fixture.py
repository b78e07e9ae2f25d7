#!/usr/bin/env python3
"""Rebuild the bundled Iowa county fixture.

Inputs:
  county.geo.json   TIGER/Line 2010 county polygons (WGS84), as shipped in the
                    `us-counties` npm package (GEOID10 / NAME10 properties).
  counties_2010_pop.txt
                    tab-separated county name and 2010 census population.

Outputs (written next to this script):
  counties_2010.csv       id,population,county
  counties_2010.geojson   polygons projected to an Albers equal-area conic
                          (standard parallels 40.5N/43.5N, origin 40N 93.5W,
                          spherical earth), metres rounded to 1 cm
  official_plan.json      the congressional plan in force from 2012 through
                          2022 (enacted 2011 on 2010 census data)

Usage: build_fixture.py path/to/county.geo.json
"""
import json
import math
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))

R = 6371008.8
LAT1, LAT2, LAT0, LON0 = map(math.radians, (40.5, 43.5, 40.0, -93.5))
N = (math.sin(LAT1) + math.sin(LAT2)) / 2
C = math.cos(LAT1) ** 2 + 2 * N * math.sin(LAT1)
RHO0 = R * math.sqrt(C - 2 * N * math.sin(LAT0)) / N


def albers(lon, lat):
    lon, lat = math.radians(lon), math.radians(lat)
    rho = R * math.sqrt(C - 2 * N * math.sin(lat)) / N
    theta = N * (lon - LON0)
    return [round(rho * math.sin(theta), 2), round(RHO0 - rho * math.cos(theta), 2)]


# County membership of the 2011 plan, by district.
PLAN = {
    0: ["Allamakee", "Benton", "Black Hawk", "Bremer", "Buchanan", "Clayton",
        "Delaware", "Dubuque", "Fayette", "Howard", "Iowa", "Jackson", "Jones",
        "Linn", "Marshall", "Mitchell", "Poweshiek", "Tama", "Winneshiek",
        "Worth"],
    1: ["Appanoose", "Cedar", "Clarke", "Clinton", "Davis", "Decatur",
        "Des Moines", "Henry", "Jasper", "Jefferson", "Johnson", "Keokuk",
        "Lee", "Louisa", "Lucas", "Mahaska", "Marion", "Monroe", "Muscatine",
        "Scott", "Van Buren", "Wapello", "Washington", "Wayne"],
    2: ["Adair", "Adams", "Cass", "Dallas", "Fremont", "Guthrie", "Madison",
        "Mills", "Montgomery", "Page", "Polk", "Pottawattamie", "Ringgold",
        "Taylor", "Union", "Warren"],
}


def main():
    src = json.load(open(sys.argv[1]))
    feats = [f for f in src["features"] if f["properties"].get("STATEFP10") == "19"]
    pops = {}
    for line in open(os.path.join(HERE, "counties_2010_pop.txt")):
        name, p = line.rstrip("\n").split("\t")
        pops[name] = int(p)

    out = []
    for f in feats:
        p = f["properties"]
        g = f["geometry"]
        polys = [g["coordinates"]] if g["type"] == "Polygon" else g["coordinates"]
        rings = [[[albers(*pt) for pt in ring] for ring in poly] for poly in polys]
        geom = ({"type": "Polygon", "coordinates": rings[0]} if len(rings) == 1
                else {"type": "MultiPolygon", "coordinates": rings})
        out.append({"type": "Feature",
                    "properties": {"id": p["GEOID10"], "name": p["NAME10"]},
                    "geometry": geom})
    out.sort(key=lambda f: f["properties"]["id"])
    assert len(out) == 99
    names = {f["properties"]["name"]: f["properties"]["id"] for f in out}
    assert set(names) == set(pops), set(names) ^ set(pops)

    with open(os.path.join(HERE, "counties_2010.geojson"), "w") as fh:
        json.dump({"type": "FeatureCollection", "features": out}, fh,
                  separators=(",", ":"))
    with open(os.path.join(HERE, "counties_2010.csv"), "w") as fh:
        fh.write("id,population,county\n")
        for f in out:
            name = f["properties"]["name"]
            fh.write(f"{f['properties']['id']},{pops[name]},{name}\n")

    assignment = {}
    for name, fips in names.items():
        assignment[fips] = next((d for d, members in PLAN.items() if name in members), 3)
    plan = {"k": 4,
            "assignment": dict(sorted(assignment.items())),
            "description": "Iowa congressional plan enacted 2011, in force 2012-2022"}
    with open(os.path.join(HERE, "official_plan.json"), "w") as fh:
        json.dump(plan, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
