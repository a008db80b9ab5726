import java.util.Scanner;

public class Main {
    public static void main(String[] args) {
        Scanner sc = new Scanner(System.in);
        int n = sc.nextInt();
        int best = 0;
        for (int i = 0; i < n; i++) {
            int v = sc.nextInt();
            best = Math.max(best, v);
        }
        System.out.println(best);
    }
}
