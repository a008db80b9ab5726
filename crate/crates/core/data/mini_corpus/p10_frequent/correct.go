package main

import "fmt"

func main() {
	var s string
	fmt.Scan(&s)
	var counts [26]int
	for _, ch := range s {
		counts[ch-'a']++
	}
	best := 0
	for i := 1; i < 26; i++ {
		if counts[i] > counts[best] {
			best = i
		}
	}
	fmt.Println(string(rune('a' + best)))
}
